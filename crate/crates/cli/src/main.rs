use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mmt_isotropy::format;
use mmt_isotropy::isotropy;
use mmt_isotropy::orbits::{self, EnumerationMode, EnumerationOptions, DEFAULT_BUDGET};
use mmt_isotropy::recovery::{self, BilinearMap};
use mmt_isotropy::suite::{CheckRegistry, Status, SuiteConfig};
use mmt_isotropy::tensor::build_mmt;
use mmt_isotropy::{bundled, Decomposition, Error, FieldSpec, Perm3, Shape};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "mmtiso",
    version,
    about = "Exact computations in the isotropy group of <m,n,p>"
)]
struct Cli {
    /// `rational` or `gf:<q>`
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Maximum number of raw (a,b,c) triples an enumeration may visit
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Enumeration threads, 0 for all cores
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the tensor <m,n,p>
    Gen {
        m: usize,
        n: usize,
        p: usize,
    },
    /// Apply an element to a tensor
    Apply {
        element: PathBuf,
        tensor: PathBuf,
    },
    /// Exit 0 iff the element fixes the tensor
    Check {
        element: PathBuf,
        tensor: PathBuf,
    },
    /// The product g∘h (h acts first)
    Compose {
        g: PathBuf,
        h: PathBuf,
    },
    Invert {
        g: PathBuf,
    },
    /// Scale a, b, c to first nonzero entry one
    Normalize {
        g: PathBuf,
    },
    /// Exit 0 iff the two elements are the same map
    Equal {
        g: PathBuf,
        h: PathBuf,
    },
    /// The transpose-and-permute element for a permutation (id, 12, 13, 23, 123, 132)
    Rho {
        perm: Perm3,
        m: usize,
        n: usize,
        p: usize,
    },
    /// Recover T(a,b,c) from maps A on M_nm, B on M_pn, C on M_pm with B(y)A(x) = C(yx)
    Recover {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
    },
    /// Structure tensor of (x,y) -> yx, or of a bilinear map M_nm x M_pn -> M_pm
    /// given on column-major coordinates
    StructureTensor {
        m: usize,
        n: usize,
        p: usize,
        #[arg(long)]
        bilinear: Option<PathBuf>,
    },
    /// Exhaustive stabilizer of a decomposition over a prime field
    Stabilizer {
        decomposition: PathBuf,
    },
    /// Search for an element mapping one decomposition onto another
    OrbitEqual {
        d1: PathBuf,
        d2: PathBuf,
    },
    /// List every element of the group over a prime field
    Enumerate {
        m: usize,
        n: usize,
        p: usize,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        /// Print only the number of elements
        #[arg(long)]
        count_only: bool,
    },
    /// Write a bundled decomposition of <2,2,2>
    Bundled {
        #[arg(value_enum)]
        name: BundledName,
    },
    /// Run the registered self-checks
    VerifySuite {
        #[arg(long, num_args = 3, value_names = ["M", "N", "P"], default_values_t = [2, 2, 2])]
        shape: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Comma-separated check names
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Print the registered check names and exit
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Small,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum BundledName {
    Strassen,
    Standard,
}

struct Failure {
    code: u8,
    msg: String,
}

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Parse { .. }
            | Error::NotPrime(_)
            | Error::FieldMismatch { .. }
            | Error::DimensionMismatch(_)
            | Error::InadmissiblePermutation { .. }
            | Error::InfiniteField(_) => EXIT_USAGE,
            _ => EXIT_FALSE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: mmt_isotropy::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.msg = format!("{}: {}", path.display(), f.msg);
        f
    })
}

fn load_element(path: &Path) -> Result<mmt_isotropy::IsotropyElement, Failure> {
    with_path(path, format::parse_element(&read(path)?))
}

fn load_decomposition(path: &Path, field: Option<FieldSpec>) -> Result<Decomposition, Failure> {
    let d = with_path(path, format::parse_decomposition(&read(path)?))?;
    match field {
        Some(f) if f != d.field() => {
            if d.field() != FieldSpec::Rationals {
                return Err(usage(format!(
                    "{}: cannot move from {} to {f}",
                    path.display(),
                    d.field()
                )));
            }
            with_path(path, d.reduce_mod(f))
        }
        _ => Ok(d),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn shape(m: usize, n: usize, p: usize) -> Result<Shape, Failure> {
    Ok(Shape::new(m, n, p)?)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let field = cli.field.unwrap_or(FieldSpec::Rationals);
    let opts = |mode| EnumerationOptions {
        mode,
        budget: cli.budget,
        workers: cli.workers,
    };
    match cli.command {
        Command::Gen { m, n, p } => {
            emit(
                &cli.out,
                &format::tensor_to_string(&build_mmt(shape(m, n, p)?, field)),
            )?;
        }
        Command::Apply { element, tensor } => {
            let g = load_element(&element)?;
            let t = with_path(&tensor, format::parse_tensor(&read(&tensor)?))?;
            emit(
                &cli.out,
                &format::tensor_to_string(&isotropy::apply(&g, &t)?),
            )?;
        }
        Command::Check { element, tensor } => {
            let g = load_element(&element)?;
            let t = with_path(&tensor, format::parse_tensor(&read(&tensor)?))?;
            let fixed = isotropy::is_isotropy(&g, &t)?;
            emit(&cli.out, &format!("isotropy {fixed}\n"))?;
            return Ok(if fixed { 0 } else { EXIT_FALSE });
        }
        Command::Compose { g, h } => {
            let gh = isotropy::compose(&load_element(&g)?, &load_element(&h)?)?;
            emit(&cli.out, &format::element_to_string(&gh))?;
        }
        Command::Invert { g } => {
            emit(
                &cli.out,
                &format::element_to_string(&isotropy::invert(&load_element(&g)?)),
            )?;
        }
        Command::Normalize { g } => {
            emit(
                &cli.out,
                &format::element_to_string(&isotropy::normalize(&load_element(&g)?)),
            )?;
        }
        Command::Equal { g, h } => {
            let same = isotropy::equal_mod_scalars(&load_element(&g)?, &load_element(&h)?);
            emit(&cli.out, &format!("equal {same}\n"))?;
            return Ok(if same { 0 } else { EXIT_FALSE });
        }
        Command::Rho { perm, m, n, p } => {
            let rho = isotropy::rho_element(perm, shape(m, n, p)?, field)?;
            emit(&cli.out, &format::element_to_string(&rho))?;
        }
        Command::Recover { a, b, c } => {
            let load = |path: &PathBuf| -> Result<_, Failure> {
                with_path(path, format::parse_linmap(&read(path)?))
            };
            let triple = recovery::recover_triple(&load(&a)?, &load(&b)?, &load(&c)?)?;
            let g = isotropy::normalize(&recovery::element_from_triple(triple)?);
            emit(&cli.out, &format::element_to_string(&g))?;
        }
        Command::StructureTensor { m, n, p, bilinear } => {
            let s = shape(m, n, p)?;
            let f = match bilinear {
                None => recovery::composition_map(s, field),
                Some(path) => {
                    let raw = with_path(&path, format::parse_bilinear(&read(&path)?))?;
                    with_path(
                        &path,
                        BilinearMap::new((n, m), (p, n), (p, m), raw.coeffs().to_vec()),
                    )?
                }
            };
            emit(
                &cli.out,
                &format::tensor_to_string(&recovery::structure_tensor_in_l(&f, s)?),
            )?;
        }
        Command::Stabilizer { decomposition } => {
            let d = load_decomposition(&decomposition, cli.field)?;
            let started = Instant::now();
            eprintln!(
                "stabilizer: {} terms over {}, shape {}",
                d.len(),
                d.field(),
                d.shape()
            );
            let res = orbits::stabilizer(&d, opts(EnumerationMode::Full))?;
            eprintln!(
                "stabilizer: order {}, closed {}, {:.2?}",
                res.order,
                res.closed,
                started.elapsed()
            );
            emit(&cli.out, &format::stabilizer_to_string(&res))?;
            return Ok(if res.closed { 0 } else { EXIT_FALSE });
        }
        Command::OrbitEqual { d1, d2 } => {
            let a = load_decomposition(&d1, cli.field)?;
            let b = load_decomposition(&d2, cli.field)?;
            match orbits::orbit_equivalent(&a, &b, opts(EnumerationMode::Full))? {
                Some(g) => emit(&cli.out, &format::element_to_string(&g))?,
                None => {
                    emit(&cli.out, "none\n")?;
                    return Ok(EXIT_FALSE);
                }
            }
        }
        Command::Enumerate {
            m,
            n,
            p,
            mode,
            count_only,
        } => {
            let s = shape(m, n, p)?;
            let mode = match mode {
                Mode::Small => EnumerationMode::Small,
                Mode::Full => EnumerationMode::Full,
            };
            let started = Instant::now();
            eprintln!(
                "enumerate: {} raw triples over {field}",
                orbits::raw_triple_count(s, field)?
            );
            let elements = orbits::enumerate_group(s, field, opts(mode))?;
            eprintln!(
                "enumerate: {} elements, {:.2?}",
                elements.len(),
                started.elapsed()
            );
            if count_only {
                emit(&cli.out, &format!("{}\n", elements.len()))?;
            } else {
                let mut text = format!("group {}\n", elements.len());
                for g in &elements {
                    text.push_str(&format::element_to_string(g));
                }
                emit(&cli.out, &text)?;
            }
        }
        Command::Bundled { name } => {
            let text = match name {
                BundledName::Strassen => bundled::STRASSEN,
                BundledName::Standard => bundled::STANDARD_222,
            };
            match cli.field {
                None | Some(FieldSpec::Rationals) => emit(&cli.out, text)?,
                Some(f) => {
                    let d = format::parse_decomposition(text)?.reduce_mod(f)?;
                    emit(&cli.out, &format::decomposition_to_string(&d))?;
                }
            }
        }
        Command::VerifySuite {
            shape: dims,
            samples,
            only,
            list,
        } => {
            let registry = CheckRegistry::with_defaults();
            if list {
                emit(&cli.out, &(registry.names().join("\n") + "\n"))?;
                return Ok(0);
            }
            let cfg = SuiteConfig {
                shape: shape(dims[0], dims[1], dims[2])?,
                field,
                samples,
                seed: cli.seed,
                budget: cli.budget,
                workers: cli.workers,
            };
            if samples == 0 {
                eprintln!("warning: --samples 0 makes every check vacuous");
            }
            let reports = registry
                .run(&cfg, &only)
                .map_err(|e| usage(e.to_string()))?;
            let mut text = format!(
                "verify-suite shape {} field {} samples {} seed {}\n",
                cfg.shape, cfg.field, cfg.samples, cfg.seed
            );
            let mut failed = 0;
            for r in &reports {
                let tag = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => {
                        failed += 1;
                        "FAIL"
                    }
                    Status::Skipped => "SKIP",
                };
                text.push_str(&format!(
                    "[{tag}] {} ({} cases): {}\n",
                    r.name, r.cases, r.claim
                ));
                if !r.detail.is_empty() {
                    text.push_str(&format!("       {}\n", r.detail));
                }
            }
            text.push_str(&format!("{} checks, {failed} failed\n", reports.len()));
            emit(&cli.out, &text)?;
            return Ok(if failed == 0 { 0 } else { EXIT_FALSE });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
