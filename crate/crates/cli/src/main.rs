//! Command-line front end: weight-file transforms, property checks,
//! minorants, embedding probes, worst-case errors, and error transfer.
//!
//! Exit codes: 0 success / property holds, 1 property fails or a
//! precondition is violated, 2 parse or usage error, 3 numerical failure,
//! 4 undecidable.

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use weightlat::families::{decay, DecayResult, WeightSpec};
use weightlat::format::{self, Body, WeightFile};
use weightlat::geometry::{maximal_monotone_minorant, verify_maximal};
use weightlat::kernels::{
    converged_embedding_lower_bound, SuperpositionKernel, UnivariateKernel, WeightsRepr,
};
use weightlat::points::PointSet;
use weightlat::scalar::parse_rational;
use weightlat::table::{check_completely_monotone, Witness};
use weightlat::transforms::{
    membership_a_d, summability, t_down, t_down_naive, t_down_spec, t_up, t_up_naive, t_up_spec,
    Verdict,
};
use weightlat::wce::{full_transfer, wce_integration};
use weightlat::{Dim, Error, TransformParams};

#[derive(Parser)]
#[command(
    name = "weightlat",
    about = "Discrete calculus on subset-lattice weights and kernel-space error transfer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the forward or inverse sum transform to a weight file.
    Transform {
        /// `up` or `down`.
        direction: String,
        /// Input weight file.
        file: PathBuf,
        /// Transform constant.
        #[arg(long = "C", default_value = "1")]
        c: String,
        /// Use exact rational arithmetic (dense files).
        #[arg(long)]
        exact: bool,
        /// Use the quadratic-time reference transform (dense files, d <= 8).
        #[arg(long)]
        naive: bool,
    },
    /// Check a property of a weight file.
    Check {
        file: PathBuf,
        /// One of: monotone, summable, A_d, decay.
        #[arg(long)]
        class: String,
        #[arg(long = "C", default_value = "1")]
        c: String,
        /// Absolute tolerance override for sign tests.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compute a maximal completely monotone minorant of a dense file.
    Minorant {
        file: PathBuf,
        #[arg(long)]
        exact: bool,
    },
    /// Probe the embedding criterion by the spectrum of a Gram difference.
    VerifyEmbedding {
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
        /// Embedding constant, or `auto` for 1.05x the converged lower bound.
        #[arg(long = "C", default_value = "auto")]
        c: String,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value = "lattice:128")]
        points: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative eigenvalue tolerance override.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Worst-case integration error of an equal-weight rule.
    Wce {
        #[arg(long)]
        k: String,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        points: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Two-sided worst-case-error transfer.
    Transfer {
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
        #[arg(long = "Cup", default_value = "1")]
        c_up: String,
        #[arg(long = "Cdown", default_value = "1")]
        c_down: String,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value = "lattice:64")]
        points: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in reference checks and print a deterministic report.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch(_, _)
        | Error::DimensionTooLarge(_, _)
        | Error::InfiniteDimension
        | Error::UnsupportedFamily(_)
        | Error::MissingIntegrals(_)
        | Error::NegativeWeight { .. } => 2,
        Error::NotSummable(_) | Error::NotMonotone(_) | Error::DomainViolation(_) => 1,
        Error::Numerical(_) => 3,
        Error::Undecidable(_) => 4,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Transform {
            direction,
            file,
            c,
            exact,
            naive,
        } => cmd_transform(&direction, &file, &c, exact, naive),
        Command::Check { file, class, c, tol } => cmd_check(&file, &class, &c, tol),
        Command::Minorant { file, exact } => cmd_minorant(&file, exact),
        Command::VerifyEmbedding {
            k,
            l,
            c,
            weights,
            d,
            points,
            seed,
            tol,
        } => cmd_verify_embedding(&k, &l, &c, &weights, d, &points, seed, tol),
        Command::Wce {
            k,
            weights,
            d,
            points,
            seed,
        } => cmd_wce(&k, &weights, d, &points, seed),
        Command::Transfer {
            k,
            l,
            c_up,
            c_down,
            weights,
            d,
            points,
            seed,
        } => cmd_transfer(&k, &l, &c_up, &c_down, &weights, d, &points, seed),
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn read_weight_file(path: &PathBuf) -> Result<(WeightFile, String), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let digest = hex_digest(text.as_bytes());
    let file = format::parse(&text)?;
    Ok((file, digest))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_c(token: &str) -> Result<f64, Error> {
    let parsed = token.parse::<f64>().ok().or_else(|| {
        parse_rational(token).map(|r| weightlat::scalar::Scalar::to_f64(&r))
    });
    let v = parsed.ok_or_else(|| Error::Parse(format!("bad constant `{token}`")))?;
    if v <= 0.0 || v.is_nan() {
        return Err(Error::InvalidArgument("constant must be positive".into()));
    }
    Ok(v)
}

fn parse_kernel(name: &str) -> Result<UnivariateKernel, Error> {
    UnivariateKernel::from_name(name).ok_or_else(|| {
        Error::Parse(format!("unknown kernel `{name}` (try min, anova, indicator)"))
    })
}

fn parse_points(token: &str, d: u32, seed: u64) -> Result<PointSet, Error> {
    let (kind, arg) = token
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("bad point spec `{token}`")))?;
    match kind {
        "lattice" => {
            let n: usize = arg
                .parse()
                .map_err(|e| Error::Parse(format!("bad node count `{arg}`: {e}")))?;
            PointSet::lattice(d, n)
        }
        "uniform" => {
            let n: usize = arg
                .parse()
                .map_err(|e| Error::Parse(format!("bad node count `{arg}`: {e}")))?;
            PointSet::uniform(d, n, seed)
        }
        "file" => PointSet::from_file(d, std::path::Path::new(arg)),
        "explicit" => {
            let nodes: Result<Vec<Vec<f64>>, Error> = arg
                .split(';')
                .map(|node| {
                    node.split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<f64>()
                                .map_err(|e| Error::Parse(format!("bad coordinate `{x}`: {e}")))
                        })
                        .collect()
                })
                .collect();
            PointSet::explicit(d, nodes?)
        }
        other => Err(Error::Parse(format!("unknown point generator `{other}`"))),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn cmd_transform(
    direction: &str,
    path: &PathBuf,
    c_token: &str,
    exact: bool,
    naive: bool,
) -> Result<ExitCode, Error> {
    let up = match direction {
        "up" => true,
        "down" => false,
        other => {
            return Err(Error::Parse(format!(
                "direction must be `up` or `down`, got `{other}`"
            )))
        }
    };
    let (file, digest) = read_weight_file(path)?;
    let use_exact = exact || file.exact;

    match &file.body {
        Body::Dense { .. } => {
            let d = file.dim.require_finite()?;
            if use_exact {
                let c = parse_rational(c_token)
                    .ok_or_else(|| Error::Parse(format!("bad constant `{c_token}`")))?;
                let table = file.dense_table_exact()?;
                let params = TransformParams::new(c, Dim::Finite(d))?;
                let out = if up {
                    if naive {
                        t_up_naive(&table, &params)?
                    } else {
                        t_up(&table, &params)?
                    }
                } else {
                    let cert = check_completely_monotone(&table);
                    if !cert.is_member {
                        return Err(Error::NotMonotone(describe_witness_exact(&cert.witness)));
                    }
                    let signed = if naive {
                        t_down_naive(&table, &params)?
                    } else {
                        t_down(&table, &params)?
                    };
                    signed.into_weights(0.0)?
                };
                print!(
                    "# transform {direction} --C {c_token} (exact)\n# input sha256={digest}\n{}",
                    format::serialize_dense_exact(&out)
                );
            } else {
                let c = parse_c(c_token)?;
                let table = file.dense_table()?;
                let params = TransformParams::finite(c, d)?;
                let out = if up {
                    if naive {
                        t_up_naive(&table, &params)?
                    } else {
                        t_up(&table, &params)?
                    }
                } else {
                    let cert = check_completely_monotone(&table);
                    if !cert.is_member {
                        return Err(Error::NotMonotone(describe_witness(&cert.witness)));
                    }
                    let signed = if naive {
                        t_down_naive(&table, &params)?
                    } else {
                        t_down(&table, &params)?
                    };
                    signed.into_weights(1e-9 * table.sup_norm().max(1.0))?
                };
                print!(
                    "# transform {direction} --C {c_token}\n# input sha256={digest}\n{}",
                    format::serialize_dense(&out)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            let c = parse_c(c_token)?;
            let spec = file.to_spec()?;
            let densify_note = "this family transforms to an entry evaluator; only finite \
                                dimensions can be serialized";
            if up {
                let out = t_up_spec(&spec, c)?;
                if let Some(s) = out.as_spec() {
                    print!(
                        "# transform up --C {c_token}\n# input sha256={digest}\n{}",
                        format::serialize_spec(s)
                    );
                    return Ok(ExitCode::SUCCESS);
                }
                match spec.dim() {
                    Dim::Finite(d) if d <= weightlat::lattice::MAX_DENSE_DIM => {
                        let table = spec.truncate_to_table(d)?;
                        let dense = t_up(&table, &TransformParams::finite(c, d)?)?;
                        print!(
                            "# transform up --C {c_token} (densified)\n# input sha256={digest}\n{}",
                            format::serialize_dense(&dense)
                        );
                        Ok(ExitCode::SUCCESS)
                    }
                    _ => Err(Error::InvalidArgument(densify_note.into())),
                }
            } else {
                let out = t_down_spec(&spec, c)?;
                if let Some(s) = out.as_spec() {
                    print!(
                        "# transform down --C {c_token}\n# input sha256={digest}\n{}",
                        format::serialize_spec(s)
                    );
                    return Ok(ExitCode::SUCCESS);
                }
                match spec.dim() {
                    Dim::Finite(d) if d <= weightlat::lattice::MAX_DENSE_DIM => {
                        let table = spec.truncate_to_table(d)?;
                        let cert = check_completely_monotone(&table);
                        if !cert.is_member {
                            return Err(Error::NotMonotone(describe_witness(&cert.witness)));
                        }
                        let signed = t_down(&table, &TransformParams::finite(c, d)?)?;
                        let dense = signed.into_weights(1e-9 * table.sup_norm().max(1.0))?;
                        print!(
                            "# transform down --C {c_token} (densified)\n# input sha256={digest}\n{}",
                            format::serialize_dense(&dense)
                        );
                        Ok(ExitCode::SUCCESS)
                    }
                    _ => Err(Error::InvalidArgument(densify_note.into())),
                }
            }
        }
    }
}

fn describe_witness(witness: &Witness<f64>) -> String {
    match witness {
        Witness::Violation { u, v, value } => {
            format!("difference along {v} at {u} is {}", fmt(*value))
        }
        Witness::InverseTable(_) => "inverse table certificate".into(),
    }
}

fn describe_witness_exact(witness: &Witness<weightlat::Rational>) -> String {
    match witness {
        Witness::Violation { u, v, value } => format!(
            "difference along {v} at {u} is {}",
            weightlat::scalar::format_rational(value)
        ),
        Witness::InverseTable(_) => "inverse table certificate".into(),
    }
}

fn verdict_exit(verdict: Verdict) -> ExitCode {
    match verdict {
        Verdict::Holds => ExitCode::SUCCESS,
        Verdict::Fails => ExitCode::from(1),
        Verdict::Unknown => ExitCode::from(4),
    }
}

fn cmd_check(
    path: &PathBuf,
    class: &str,
    c_token: &str,
    tol: Option<f64>,
) -> Result<ExitCode, Error> {
    let (file, digest) = read_weight_file(path)?;
    println!("= weightlat check");
    println!("command: check --class {class} --C {c_token}");
    println!("input: {} sha256={digest}", path.display());
    match class {
        "monotone" => {
            let verdict = match &file.body {
                Body::Dense { .. } if file.exact => {
                    let table = file.dense_table_exact()?;
                    println!("tolerance: exact arithmetic");
                    let cert = check_completely_monotone(&table);
                    if cert.is_member {
                        println!("verdict: PASS (completely monotone)");
                        Verdict::Holds
                    } else {
                        println!("verdict: FAIL");
                        println!("witness: {}", describe_witness_exact(&cert.witness));
                        Verdict::Fails
                    }
                }
                Body::Dense { .. } => {
                    let table = file.dense_table()?;
                    let tol_abs =
                        tol.unwrap_or_else(|| 1e-12 * table.sup_norm().max(1e-300));
                    println!("tolerance: {} absolute sign test", fmt(tol_abs));
                    let cert = weightlat::table::check_completely_monotone_with_tol(
                        &table, tol_abs,
                    );
                    if cert.is_member {
                        println!("verdict: PASS (completely monotone)");
                        println!("min inverse entry: {}", fmt(cert.min_value));
                        Verdict::Holds
                    } else {
                        println!("verdict: FAIL");
                        println!("witness: {}", describe_witness(&cert.witness));
                        Verdict::Fails
                    }
                }
                _ => {
                    let spec = file.to_spec()?;
                    spec_monotone_verdict(&spec)?
                }
            };
            if verdict == Verdict::Unknown {
                println!("verdict: UNKNOWN (no finite certificate for this family)");
            }
            Ok(verdict_exit(verdict))
        }
        "summable" => {
            let c = parse_c(c_token)?;
            let report = match &file.body {
                Body::Dense { .. } => {
                    let table = file.dense_table()?;
                    let mut total = 0.0;
                    for (u, v) in table.iter() {
                        total += c.powi(2 * u.cardinality() as i32) * v;
                    }
                    println!("verdict: PASS (finite table)");
                    println!("value: {}", fmt(total));
                    return Ok(ExitCode::SUCCESS);
                }
                _ => summability(&file.to_spec()?, c)?,
            };
            match report.verdict {
                Verdict::Holds => {
                    println!("verdict: PASS ({})", report.reason);
                    if let Some(v) = report.value {
                        println!("value: {} (enclosure width {})", fmt(v.mid()), fmt(v.width()));
                    }
                }
                Verdict::Fails => println!("verdict: FAIL ({})", report.reason),
                Verdict::Unknown => println!("verdict: UNKNOWN ({})", report.reason),
            }
            Ok(verdict_exit(report.verdict))
        }
        "A_d" | "a_d" => {
            let membership = match &file.body {
                Body::Dense { .. } => {
                    let table = file.dense_table()?;
                    let cert = check_completely_monotone(&table);
                    if cert.is_member {
                        println!("verdict: PASS (finite dimension: equals monotonicity)");
                        return Ok(ExitCode::SUCCESS);
                    }
                    println!("verdict: FAIL ({})", describe_witness(&cert.witness));
                    return Ok(ExitCode::from(1));
                }
                _ => membership_a_d(&file.to_spec()?)?,
            };
            match membership.verdict {
                Verdict::Holds => println!("verdict: PASS ({})", membership.reason),
                Verdict::Fails => println!("verdict: FAIL ({})", membership.reason),
                Verdict::Unknown => println!("verdict: UNKNOWN ({})", membership.reason),
            }
            Ok(verdict_exit(membership.verdict))
        }
        "decay" => {
            let spec = file.to_spec()?;
            let result = decay(&spec)?;
            println!("decay: {result}");
            match result {
                DecayResult::Interval(_, _) => Ok(ExitCode::from(4)),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
        other => Err(Error::Parse(format!(
            "unknown class `{other}` (try monotone, summable, A_d, decay)"
        ))),
    }
}

fn spec_monotone_verdict(spec: &WeightSpec) -> Result<Verdict, Error> {
    match spec {
        WeightSpec::Product { seq, .. } => {
            if seq.get(1) <= 1.0 {
                println!("verdict: PASS (all product factors lie in [0, 1])");
                Ok(Verdict::Holds)
            } else {
                println!("verdict: FAIL (factor {} exceeds 1)", fmt(seq.get(1)));
                Ok(Verdict::Fails)
            }
        }
        WeightSpec::Pod { d, .. } => {
            let probe = match d {
                Dim::Finite(dd) => (*dd).min(10),
                Dim::Infinite => 10,
            };
            let table = spec.with_dim(Dim::Finite(probe)).truncate_to_table(probe)?;
            let cert = check_completely_monotone(&table);
            if !cert.is_member {
                println!(
                    "verdict: FAIL (dense section of dimension {probe}: {})",
                    describe_witness(&cert.witness)
                );
                return Ok(Verdict::Fails);
            }
            if matches!(d, Dim::Finite(dd) if *dd <= 10) {
                println!("verdict: PASS (dense check at the full dimension)");
                Ok(Verdict::Holds)
            } else {
                Ok(Verdict::Unknown)
            }
        }
        WeightSpec::FiniteOrder { entries, .. } | WeightSpec::FinSupport { entries, .. } => {
            let max_coord = entries
                .keys()
                .filter_map(|c| c.last().copied())
                .max()
                .unwrap_or(1);
            if max_coord > weightlat::lattice::MAX_DENSE_DIM {
                return Ok(Verdict::Unknown);
            }
            let table = spec
                .with_dim(Dim::Finite(max_coord))
                .truncate_to_table(max_coord)?;
            let cert = check_completely_monotone(&table);
            if cert.is_member {
                println!("verdict: PASS (dense check on the support closure)");
                Ok(Verdict::Holds)
            } else {
                println!("verdict: FAIL ({})", describe_witness(&cert.witness));
                Ok(Verdict::Fails)
            }
        }
    }
}

fn cmd_minorant(path: &PathBuf, exact: bool) -> Result<ExitCode, Error> {
    let (file, digest) = read_weight_file(path)?;
    let use_exact = exact || file.exact;
    if use_exact {
        let table = file.dense_table_exact()?;
        let result = maximal_monotone_minorant(&table)?;
        let (confirmed, _) = verify_maximal(&result.minorant, &table)?;
        print!("{}", format::serialize_dense_exact(&result.minorant));
        println!("# minorant report (exact)");
        println!("# input sha256={digest}");
        println!(
            "# objective: {}",
            weightlat::scalar::format_rational(&result.objective)
        );
        println!("# maximal: {}", result.maximal && confirmed);
        return Ok(ExitCode::SUCCESS);
    }
    let table = file.dense_table()?;
    let result = maximal_monotone_minorant(&table)?;
    let (confirmed, headroom) = verify_maximal(&result.minorant, &table)?;
    print!("{}", format::serialize_dense(&result.minorant));
    println!("# minorant report");
    println!("# input sha256={digest}");
    println!("# objective: {}", fmt(result.objective));
    println!("# maximal: {}", result.maximal && confirmed);
    let max_headroom = headroom.values().iter().cloned().fold(0.0f64, f64::max);
    println!("# max headroom: {}", fmt(max_headroom));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_embedding(
    k_name: &str,
    l_name: &str,
    c_token: &str,
    weights_path: &PathBuf,
    d: u32,
    points_token: &str,
    seed: u64,
    tol: Option<f64>,
) -> Result<ExitCode, Error> {
    let k = parse_kernel(k_name)?;
    let l = parse_kernel(l_name)?;
    let (file, digest) = read_weight_file(weights_path)?;
    let weights = file.to_weights_repr()?;
    let points = parse_points(points_token, d, seed)?;
    let (c, c_policy) = if c_token == "auto" {
        let lb = converged_embedding_lower_bound(k, l)?;
        (1.05 * lb, format!("auto = 1.05 x {}", fmt(lb)))
    } else {
        (parse_c(c_token)?, c_token.to_string())
    };
    let tol_rel = tol.unwrap_or(weightlat::kernels::EMBEDDING_TOL_REL);
    let report =
        weightlat::kernels::verify_embedding_with_tol(k, l, c, &weights, &points.nodes, d, tol_rel)?;
    println!("= weightlat verify-embedding");
    println!(
        "command: verify-embedding --k {k_name} --l {l_name} --C {c_policy} --d {d} --points {points_token} --seed {seed}"
    );
    println!("input: {} sha256={digest}", weights_path.display());
    println!("points used: {}", report.points_used);
    println!("C: {}", fmt(report.c));
    println!(
        "gram difference eigenvalues: min {} max {}",
        fmt(report.min_eigenvalue),
        fmt(report.max_eigenvalue)
    );
    println!("tolerance: min eigenvalue >= -{} x max eigenvalue", fmt(tol_rel));
    println!(
        "embedding-norm lower bound at these points: {}",
        fmt(report.c_lb)
    );
    println!("verdict: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_wce(
    k_name: &str,
    weights_path: &PathBuf,
    d: u32,
    points_token: &str,
    seed: u64,
) -> Result<ExitCode, Error> {
    let k = parse_kernel(k_name)?;
    let (file, digest) = read_weight_file(weights_path)?;
    let weights = file.to_weights_repr()?;
    let points = parse_points(points_token, d, seed)?;
    let kernel = SuperpositionKernel::new(weights, k, d)?;
    let e = wce_integration(&points, &kernel)?;
    println!("= weightlat wce");
    println!("command: wce --k {k_name} --d {d} --points {points_token} --seed {seed}");
    println!("input: {} sha256={digest}", weights_path.display());
    println!("nodes: {}", points.len());
    println!("wce: {}", fmt(e));
    println!("wce^2: {}", fmt(e * e));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_transfer(
    k_name: &str,
    l_name: &str,
    c_up_token: &str,
    c_down_token: &str,
    weights_path: &PathBuf,
    d: u32,
    points_token: &str,
    seed: u64,
) -> Result<ExitCode, Error> {
    let k = parse_kernel(k_name)?;
    let l = parse_kernel(l_name)?;
    let c_up = parse_c(c_up_token)?;
    let c_down = parse_c(c_down_token)?;
    let (file, digest) = read_weight_file(weights_path)?;
    let weights = file.to_weights_repr()?;
    let points = parse_points(points_token, d, seed)?;
    let report = full_transfer(&points, &weights, k, l, c_up, c_down)?;
    println!("= weightlat transfer");
    println!(
        "command: transfer --k {k_name} --l {l_name} --Cup {c_up_token} --Cdown {c_down_token} --d {d} --points {points_token} --seed {seed}"
    );
    println!("input: {} sha256={digest}", weights_path.display());
    println!("nodes: {}", points.len());
    println!("wce lower:  {}", fmt(report.wce_lower));
    println!("wce base:   {}", fmt(report.wce_base));
    println!("wce upper:  {}", fmt(report.wce_upper));
    println!("minorant substituted: {}", report.minorant_used);
    println!("ordering slack: 1e-10");
    println!(
        "verdict: {}",
        if report.ordering_ok {
            "PASS (lower <= base <= upper)"
        } else {
            "FAIL"
        }
    );
    Ok(if report.ordering_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_selftest(seed: u64) -> Result<ExitCode, Error> {
    use weightlat::WeightTable;
    println!("= weightlat selftest");
    println!("command: selftest --seed {seed}");
    let mut results: Vec<(String, bool, String)> = Vec::new();

    // Forward transform of the reference order-dependent table.
    let pod = WeightSpec::Pod {
        seq: weightlat::families::SequenceSpec::Explicit(vec![3.0, 2.0, 1.0]),
        order: weightlat::families::OrderSeq::Explicit(vec![1.0, 3.0, 4.0, 5.0]),
        a: 1.0,
        c_a: 5.0,
        d: Dim::Finite(3),
    };
    let table = pod.truncate_to_table(3)?;
    let up = t_up(&table, &TransformParams::finite(1.0, 3)?)?;
    let got = [
        *up.get(weightlat::Subset::from_members(&[2])),
        *up.get(weightlat::Subset::from_members(&[3])),
        *up.get(weightlat::Subset::from_members(&[1, 2])),
        *up.get(weightlat::Subset::from_members(&[1, 3])),
    ];
    results.push((
        "pod forward table".into(),
        got == [68.0, 53.0, 54.0, 42.0],
        format!("{got:?}"),
    ));
    let still_pod = weightlat::families::is_pod_table(&up, 1e-9);
    results.push((
        "pod shape rejected after transform".into(),
        !still_pod,
        format!("recognizer: {still_pod}"),
    ));

    // Inverse-transform suite on the reference counterexample.
    let gamma = WeightTable::new(2, vec![5.0, 5.0, 3.0, 1.0])?;
    let down = t_down(&gamma, &TransformParams::finite(1.0, 2)?)?;
    results.push((
        "inverse table".into(),
        down.values() == [-2.0, 4.0, 2.0, 1.0],
        format!("{:?}", down.values()),
    ));
    let cert = check_completely_monotone(&gamma);
    results.push((
        "monotonicity rejected with witness".into(),
        !cert.is_member && cert.witness_holds(&gamma, 1e-9),
        format!("min entry {}", fmt(cert.min_value)),
    ));
    let minorant = maximal_monotone_minorant(&gamma)?;
    results.push((
        "maximal minorant objective".into(),
        (minorant.objective - 12.0).abs() < 1e-9 && minorant.maximal,
        format!("objective {}", fmt(minorant.objective)),
    ));
    let eta = WeightTable::new(2, vec![5.0, 5.0, 1.0, 1.0])?;
    let zeta = WeightTable::new(2, vec![5.0, 3.0, 3.0, 1.0])?;
    let (eta_max, _) = verify_maximal(&eta, &gamma)?;
    let (zeta_max, _) = verify_maximal(&zeta, &gamma)?;
    results.push((
        "reference candidates maximal and incomparable".into(),
        eta_max && zeta_max && !eta.le(&zeta) && !zeta.le(&eta),
        format!("eta {eta_max}, zeta {zeta_max}"),
    ));

    // Single-node worst-case error at the midpoint.
    let single = WeightTable::new(1, vec![0.0, 1.0])?;
    let kernel =
        SuperpositionKernel::new(WeightsRepr::Table(single), UnivariateKernel::Min, 1)?;
    let points = PointSet::explicit(1, vec![vec![0.5]])?;
    let e = wce_integration(&points, &kernel)?;
    results.push((
        "single-node midpoint error".into(),
        (e * e - 1.0 / 12.0).abs() < 1e-12,
        format!("wce^2 = {}", fmt(e * e)),
    ));

    let mut all_ok = true;
    for (name, ok, detail) in &results {
        println!("[{}] {name}: {detail}", if *ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    }
    println!("overall: {}", if all_ok { "PASS" } else { "FAIL" });
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
