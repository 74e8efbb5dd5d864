//! Command-line front end for reproducible spin-1/2 experiments.
//!
//! Every command embeds the seed, tool version, and the command line itself
//! in its output, and identical invocations produce bit-identical bytes.
//! Exit codes: 0 success, 2 validation failure, 3 internal cross-check
//! failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinhalf::bell::{bell_scan, lhv_feasibility, quantum_bell_lhs, scan_csv, DirectionTriple,
    FeasibilityReport, ScanResult, TOL_BELL};
use spinhalf::bell::mc_singlet_joint;
use spinhalf::entangle::Sign;
use spinhalf::jsonfmt::{fmt_f64_17, to_json_17};
use spinhalf::measure::{recover_phase, sample_frequencies, FrequencyEstimate, RngStream};
use spinhalf::qcore::{mix, pure_to_density, purity, DensityMatrix, PureState};
use spinhalf::spin::{basis_pair, component_probs, spin_state, Direction};
use spinhalf::QmError;

#[derive(Parser)]
#[command(
    name = "spinhalf",
    version,
    about = "Spin-1/2 quantum statistics: Born sampling, entanglement, Bell analysis",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for all random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Interpret all input angles as degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the spin state along (theta, phi) and report its z-basis
    /// probabilities.
    State {
        /// Polar angle from +z.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Azimuth from +x.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
    /// Sample repeated spin-component measurements of one prepared state.
    Measure {
        /// Polar angle of the prepared state.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Azimuth of the prepared state.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Measurement direction: x, y, z, or "theta,phi".
        #[arg(long, default_value = "z")]
        direction: String,
        /// Number of measurements.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
    },
    /// Evaluate the Bell combination and the classical feasibility verdict
    /// for a coplanar direction triple.
    Bell {
        /// Angle between directions a and b.
        #[arg(long)]
        theta_ab: f64,
        /// Angle between directions b and c.
        #[arg(long)]
        theta_bc: f64,
    },
    /// Sweep coplanar triples on an angle grid and report the Bell
    /// combination everywhere.
    Scan {
        /// Grid step.
        #[arg(long)]
        step: f64,
        /// Largest angle to include (default pi).
        #[arg(long)]
        max: Option<f64>,
    },
    /// Monte Carlo joint-outcome table for singlet measurements along two
    /// directions.
    #[command(name = "singlet-mc")]
    SingletMc {
        /// Direction for spin A: x, y, z, or "theta,phi".
        #[arg(long, default_value = "z")]
        a: String,
        /// Direction for spin B: x, y, z, or "theta,phi".
        #[arg(long, default_value = "x")]
        b: String,
        /// Number of joint samples.
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
    },
    /// Test whether anticorrelated classical weights can reproduce the
    /// singlet's pairwise statistics for a coplanar triple.
    Lhv {
        /// Angle between directions a and b.
        #[arg(long)]
        theta_ab: f64,
        /// Angle between directions b and c.
        #[arg(long)]
        theta_bc: f64,
    },
    /// Compare a superposition against the mixture with the same z-basis
    /// probabilities, including the phase-sensitive analysis that tells
    /// them apart.
    Discriminate {
        /// Polar angle of the superposition.
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
        /// Azimuth (relative phase) of the superposition.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
}

#[derive(Debug)]
struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<QmError> for CliFailure {
    fn from(err: QmError) -> Self {
        let code = match err {
            QmError::CrossCheck { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(echo: &str, seed: u64, body: T) -> String {
    let wrapped = Envelope {
        tool: "spinhalf",
        version: env!("CARGO_PKG_VERSION"),
        command: echo.to_string(),
        seed,
        body,
    };
    let mut json = to_json_17(&wrapped);
    json.push('\n');
    json
}

fn csv_preamble(echo: &str, seed: u64) -> String {
    format!(
        "# tool=spinhalf version={} seed={}\n# command={}\n",
        env!("CARGO_PKG_VERSION"),
        seed,
        echo
    )
}

fn convert_angle(value: f64, degrees: bool) -> f64 {
    if degrees {
        value.to_radians()
    } else {
        value
    }
}

fn parse_direction(spec: &str, degrees: bool) -> Result<Direction, CliFailure> {
    match spec.trim() {
        "x" | "+x" => return Ok(Direction::plus_x()),
        "y" | "+y" => return Ok(Direction::plus_y()),
        "z" | "+z" => return Ok(Direction::plus_z()),
        "-x" => return Ok(Direction::plus_x().antipode()),
        "-y" => return Ok(Direction::plus_y().antipode()),
        "-z" => return Ok(Direction::plus_z().antipode()),
        _ => {}
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(CliFailure::validation(format!(
            "direction must be x, y, z (optionally signed) or \"theta,phi\", got {spec:?}"
        )));
    }
    let mut angles = [0.0; 2];
    for (slot, part) in angles.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            CliFailure::validation(format!("invalid number {:?} in direction {spec:?}", part))
        })?;
    }
    Ok(Direction::from_angles(
        convert_angle(angles[0], degrees),
        convert_angle(angles[1], degrees),
    )?)
}

fn sigma_deviation(ratio: f64, analytic: f64, shots: u64) -> f64 {
    let sigma = (analytic * (1.0 - analytic) / shots as f64).sqrt();
    if sigma > 0.0 {
        (ratio - analytic).abs() / sigma
    } else {
        0.0
    }
}

#[derive(Serialize)]
struct StateBody {
    theta: f64,
    phi: f64,
    state: PureState,
    p_plus_z: f64,
    p_minus_z: f64,
}

#[derive(Serialize)]
struct MeasureBody {
    theta: f64,
    phi: f64,
    direction: Direction,
    estimate: FrequencyEstimate,
    ratios: Vec<f64>,
    analytic: [f64; 2],
    sigma_dev: [f64; 2],
}

#[derive(Serialize)]
struct BellBody {
    theta_ab: f64,
    theta_bc: f64,
    theta_ac: f64,
    lhs: f64,
    violated: bool,
    triple: DirectionTriple,
    lhv: FeasibilityReport,
}

#[derive(Serialize)]
struct ScanBody {
    step: f64,
    max_angle: f64,
    #[serde(flatten)]
    result: ScanResult,
}

#[derive(Serialize)]
struct SingletMcBody {
    a: Direction,
    b: Direction,
    table: spinhalf::bell::McJointEstimate,
    analytic: [[f64; 2]; 2],
    sigma_dev: [[f64; 2]; 2],
}

#[derive(Serialize)]
struct LhvBody {
    theta_ab: f64,
    theta_bc: f64,
    triple: DirectionTriple,
    #[serde(flatten)]
    report: FeasibilityReport,
}

#[derive(Serialize)]
struct AnalysisRow {
    label: String,
    direction: Direction,
    p_pure: f64,
    p_mixed: f64,
    gap: f64,
}

#[derive(Serialize)]
struct DiscriminateBody {
    theta: f64,
    phi: f64,
    state: PureState,
    mixture: DensityMatrix,
    purity_pure: f64,
    purity_mixed: f64,
    recovered_phi: f64,
    best_gap: f64,
    analyses: Vec<AnalysisRow>,
}

fn require_json(format: Format, command: &str) -> Result<(), CliFailure> {
    if format == Format::Csv {
        return Err(CliFailure::validation(format!(
            "csv output is not defined for the {command} command; use --format json"
        )));
    }
    Ok(())
}

fn run(cli: &Cli, echo: &str) -> Result<String, CliFailure> {
    let seed = cli.seed;
    let degrees = cli.degrees;
    match &cli.command {
        Command::State { theta, phi } => {
            require_json(cli.format, "state")?;
            let theta = convert_angle(*theta, degrees);
            let phi = convert_angle(*phi, degrees);
            let state = spin_state(theta, phi)?;
            let (p_plus_z, p_minus_z) = component_probs(&state, &Direction::plus_z())?;
            Ok(envelope(
                echo,
                seed,
                StateBody {
                    theta,
                    phi,
                    state,
                    p_plus_z,
                    p_minus_z,
                },
            ))
        }
        Command::Measure {
            theta,
            phi,
            direction,
            shots,
        } => {
            let theta = convert_angle(*theta, degrees);
            let phi = convert_angle(*phi, degrees);
            let direction = parse_direction(direction, degrees)?;
            let state = spin_state(theta, phi)?;
            let (plus, minus) = basis_pair(&direction);
            let mut rng = RngStream::new(seed);
            let estimate = sample_frequencies(&state, &[plus, minus], *shots, &mut rng)?;
            let (p_plus, p_minus) = component_probs(&state, &direction)?;
            let analytic = [p_plus, p_minus];
            let ratios = estimate.ratios();
            let sigma_dev = [
                sigma_deviation(ratios[0], analytic[0], *shots),
                sigma_deviation(ratios[1], analytic[1], *shots),
            ];
            match cli.format {
                Format::Json => Ok(envelope(
                    echo,
                    seed,
                    MeasureBody {
                        theta,
                        phi,
                        direction,
                        estimate,
                        ratios,
                        analytic,
                        sigma_dev,
                    },
                )),
                Format::Csv => {
                    let mut out = csv_preamble(echo, seed);
                    out.push_str("outcome,count,ratio,analytic,sigma_dev\n");
                    for (i, sign) in Sign::BOTH.iter().enumerate() {
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            sign.label(),
                            estimate.counts()[i],
                            fmt_f64_17(ratios[i]),
                            fmt_f64_17(analytic[i]),
                            fmt_f64_17(sigma_dev[i]),
                        ));
                    }
                    Ok(out)
                }
            }
        }
        Command::Bell { theta_ab, theta_bc } => {
            require_json(cli.format, "bell")?;
            let theta_ab = convert_angle(*theta_ab, degrees);
            let theta_bc = convert_angle(*theta_bc, degrees);
            for (name, value) in [("theta-ab", theta_ab), ("theta-bc", theta_bc)] {
                if !(value > 0.0) {
                    return Err(CliFailure::validation(format!(
                        "{name} must be a positive angle, got {value}"
                    )));
                }
            }
            let triple = DirectionTriple::coplanar(theta_ab, theta_bc)?;
            let lhs = quantum_bell_lhs(&triple)?;
            let lhv = lhv_feasibility(&triple)?;
            Ok(envelope(
                echo,
                seed,
                BellBody {
                    theta_ab,
                    theta_bc,
                    theta_ac: theta_ab + theta_bc,
                    lhs,
                    violated: lhs < -TOL_BELL,
                    triple,
                    lhv,
                },
            ))
        }
        Command::Scan { step, max } => {
            let step = convert_angle(*step, degrees);
            let max_angle = max.map_or(PI, |m| convert_angle(m, degrees));
            let result = bell_scan(step, max_angle)?;
            match cli.format {
                Format::Json => Ok(envelope(
                    echo,
                    seed,
                    ScanBody {
                        step,
                        max_angle,
                        result,
                    },
                )),
                Format::Csv => {
                    let mut out = csv_preamble(echo, seed);
                    out.push_str(&scan_csv(&result));
                    out.push_str(&format!(
                        "# min_lhs={} theta_ab={} theta_bc={}\n",
                        fmt_f64_17(result.min_lhs),
                        fmt_f64_17(result.min_theta_ab),
                        fmt_f64_17(result.min_theta_bc),
                    ));
                    Ok(out)
                }
            }
        }
        Command::SingletMc { a, b, shots } => {
            let a = parse_direction(a, degrees)?;
            let b = parse_direction(b, degrees)?;
            let mut rng = RngStream::new(seed);
            let table = mc_singlet_joint(&a, &b, *shots, &mut rng)?;
            let mut analytic = [[0.0; 2]; 2];
            let mut sigma_dev = [[0.0; 2]; 2];
            for ea in Sign::BOTH {
                for eb in Sign::BOTH {
                    let p = spinhalf::entangle::singlet_joint_prob(ea, &a, eb, &b);
                    analytic[ea.index()][eb.index()] = p;
                    sigma_dev[ea.index()][eb.index()] =
                        sigma_deviation(table.ratios[ea.index()][eb.index()], p, *shots);
                }
            }
            match cli.format {
                Format::Json => Ok(envelope(
                    echo,
                    seed,
                    SingletMcBody {
                        a,
                        b,
                        table,
                        analytic,
                        sigma_dev,
                    },
                )),
                Format::Csv => {
                    let mut out = csv_preamble(echo, seed);
                    out.push_str("eps_a,eps_b,count,ratio,analytic,sigma_dev\n");
                    for ea in Sign::BOTH {
                        for eb in Sign::BOTH {
                            let (i, j) = (ea.index(), eb.index());
                            out.push_str(&format!(
                                "{},{},{},{},{},{}\n",
                                ea.label(),
                                eb.label(),
                                table.counts[i][j],
                                fmt_f64_17(table.ratios[i][j]),
                                fmt_f64_17(analytic[i][j]),
                                fmt_f64_17(sigma_dev[i][j]),
                            ));
                        }
                    }
                    Ok(out)
                }
            }
        }
        Command::Lhv { theta_ab, theta_bc } => {
            require_json(cli.format, "lhv")?;
            let theta_ab = convert_angle(*theta_ab, degrees);
            let theta_bc = convert_angle(*theta_bc, degrees);
            let triple = DirectionTriple::coplanar(theta_ab, theta_bc)?;
            let report = lhv_feasibility(&triple)?;
            Ok(envelope(
                echo,
                seed,
                LhvBody {
                    theta_ab,
                    theta_bc,
                    triple,
                    report,
                },
            ))
        }
        Command::Discriminate { theta, phi } => {
            require_json(cli.format, "discriminate")?;
            let theta = convert_angle(*theta, degrees);
            let phi = convert_angle(*phi, degrees);
            let state = spin_state(theta, phi)?;
            let weights = [
                state.amps()[0].norm_sqr(),
                state.amps()[1].norm_sqr(),
            ];
            let z_basis = [
                PureState::basis_state(2, 0)?,
                PureState::basis_state(2, 1)?,
            ];
            let mixture = mix(&z_basis, &weights)?;
            let (p_x, _) = component_probs(&state, &Direction::plus_x())?;
            let (p_y, _) = component_probs(&state, &Direction::plus_y())?;
            let recovered_phi = recover_phase(p_x, p_y);
            let matched = Direction::from_angles(FRAC_PI_2, recovered_phi)?;
            let mut analyses = Vec::new();
            for (label, direction) in [
                ("plus_x".to_string(), Direction::plus_x()),
                ("plus_y".to_string(), Direction::plus_y()),
                ("matched_azimuth".to_string(), matched),
            ] {
                let (p_pure, p_mixed) =
                    spinhalf::measure::discriminate_phase(&state, &mixture, &direction)?;
                analyses.push(AnalysisRow {
                    label,
                    direction,
                    p_pure,
                    p_mixed,
                    gap: p_pure - p_mixed,
                });
            }
            let best_gap = analyses
                .iter()
                .map(|row| row.gap.abs())
                .fold(0.0, f64::max);
            Ok(envelope(
                echo,
                seed,
                DiscriminateBody {
                    theta,
                    phi,
                    state: state.clone(),
                    mixture: mixture.clone(),
                    purity_pure: purity(&pure_to_density(&state)),
                    purity_mixed: purity(&mixture),
                    recovered_phi,
                    best_gap,
                    analyses,
                },
            ))
        }
    }
}

fn main() {
    let echo = std::env::args()
        .skip(1)
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(&cli, &echo) {
        Ok(output) => {
            if let Some(path) = &cli.output {
                if let Err(err) = std::fs::write(path, &output) {
                    eprintln!("error: cannot write {}: {err}", path.display());
                    std::process::exit(2);
                }
            } else {
                print!("{output}");
            }
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}
