//! `steklov`: batch solver for the first Steklov-Dirichlet eigenvalue of
//! planar eccentric annuli.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 numerical
//! non-convergence, 3 verification failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use steklov_cli::format::{sig, sig12, sig15};
use steklov_cli::{svg, sweep, verify};
use steklov_core::analysis::{
    bounds_report, coefficient_ladder, n0_threshold, shape_derivative, sigma_cap,
};
use steklov_core::eigenfunction::series_from_eigvec;
use steklov_core::spectral::{
    finite_section, smallest_eigpair, solve_first_eigenvalue, DEFAULT_N_MAX, DEFAULT_TOLERANCE,
};
use steklov_core::{Annulus, Error};

#[derive(Parser)]
#[command(
    name = "steklov",
    version,
    about = "First Steklov-Dirichlet eigenvalue of planar eccentric annuli"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one annulus by truncation doubling.
    Eig {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Center offset; 0 returns the exact concentric value.
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Also escalate the variational upper bound until the certificate
        /// gap drops below 1e-12.
        #[arg(long)]
        certify: bool,
    },
    /// Sweep the offset fraction t/(r2 - r1) and write a CSV table.
    Sweep {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long = "t-frac-start", default_value_t = 0.0)]
        t_frac_start: f64,
        #[arg(long = "t-frac-end", default_value_t = 0.98)]
        t_frac_end: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional standalone SVG plot of sigma against t_frac.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Analytic bounds next to the computed eigenvalue.
    Bounds {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
    },
    /// Derivative of the eigenvalue in the center offset.
    Derivative {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
    },
    /// Coefficient-ratio ladder diagnostics (T_n, F_n, L_n, U_n).
    Ladder {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long = "n-max", default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Optional CSV with one row per index n.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify {
        /// Reduced grids, completes in a few seconds.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Eig {
            r1,
            r2,
            t,
            tol,
            n_max,
            certify,
        } => cmd_eig(r1, r2, t, tol, n_max, certify),
        Command::Sweep {
            r1,
            r2,
            t_frac_start,
            t_frac_end,
            steps,
            tol,
            n_max,
            out,
            svg,
        } => cmd_sweep(
            sweep::SweepSpec {
                r1,
                r2,
                t_frac_start,
                t_frac_end,
                steps,
                tol,
                n_max,
            },
            &out,
            svg.as_deref(),
        ),
        Command::Bounds {
            r1,
            r2,
            t,
            tol,
            n_max,
        } => cmd_bounds(r1, r2, t, tol, n_max),
        Command::Derivative {
            r1,
            r2,
            t,
            tol,
            n_max,
        } => cmd_derivative(r1, r2, t, tol, n_max),
        Command::Ladder {
            r1,
            r2,
            t,
            tol,
            n_max,
            out,
        } => cmd_ladder(r1, r2, t, tol, n_max, out.as_deref()),
        Command::Verify { quick } => cmd_verify(quick),
    };
    ExitCode::from(code)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidAnnulus { .. }
        | Error::DegenerateFrame
        | Error::OutOfDomain { .. }
        | Error::NotNormalized
        | Error::FrameMismatch => 1,
        _ => 2,
    }
}

fn fail(err: &Error) -> u8 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn cmd_eig(r1: f64, r2: f64, t: f64, tol: f64, n_max: usize, certify: bool) -> u8 {
    let annulus = match Annulus::new(r1, r2, t) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let converged = match solve_first_eigenvalue(&annulus, tol, n_max) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    println!("sigma={}", sig15(converged.sigma));
    println!("n_final={}", converged.n_final);
    for step in &converged.history {
        let delta = step
            .delta
            .map(|d| sig(d, 6))
            .unwrap_or_else(|| "-".to_string());
        println!("n={} sigma={} delta={}", step.n, sig15(step.sigma), delta);
    }
    if certify {
        if annulus.is_concentric() {
            println!("m_final=0");
            println!("E_final=0");
            return 0;
        }
        let frame = match annulus.bipolar_frame() {
            Ok(f) => f,
            Err(e) => return fail(&e),
        };
        let cap = 4 * converged.n_final.max(8);
        for m in 1..=cap {
            let gap = match smallest_eigpair(&finite_section(&frame, m))
                .and_then(|eig| series_from_eigvec(&frame, &eig))
                .and_then(|s| s.rayleigh_quotient())
            {
                Ok(quotient) => (converged.sigma - quotient).abs(),
                Err(e) => return fail(&e),
            };
            if gap < 1e-12 {
                println!("m_final={m}");
                println!("E_final={}", sig(gap, 6));
                return 0;
            }
        }
        eprintln!("error: certificate gap stayed above 1e-12 up to m={cap}");
        return 2;
    }
    0
}

fn cmd_sweep(
    spec: sweep::SweepSpec,
    out: &std::path::Path,
    svg_out: Option<&std::path::Path>,
) -> u8 {
    if let Err(msg) = spec.validate() {
        eprintln!("error: {msg}");
        return 1;
    }
    let results = sweep::run(&spec, true);
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (t_frac, result) in &results {
        match result {
            Ok(row) => rows.push(*row),
            Err(e) => {
                failures += 1;
                eprintln!("error: t_frac={t_frac}: {e}");
            }
        }
    }
    let mut buffer = Vec::new();
    if let Err(e) = sweep::write_csv(&mut buffer, &rows) {
        eprintln!("error: {e}");
        return 1;
    }
    if let Err(e) = fs::write(out, &buffer) {
        eprintln!("error: writing {}: {e}", out.display());
        return 1;
    }
    if let Some(path) = svg_out {
        if let Err(e) = fs::write(path, svg::render(&rows)) {
            eprintln!("error: writing {}: {e}", path.display());
            return 1;
        }
    }
    println!(
        "rows={} adjacent_increases={}",
        rows.len(),
        sweep::adjacent_increases(&rows)
    );
    if failures > 0 {
        eprintln!("error: {failures} grid point(s) failed; CSV is partial");
        return 2;
    }
    0
}

fn cmd_bounds(r1: f64, r2: f64, t: f64, tol: f64, n_max: usize) -> u8 {
    let annulus = match Annulus::new(r1, r2, t) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let bounds = bounds_report(&annulus);
    let converged = match solve_first_eigenvalue(&annulus, tol, n_max) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    println!("sigma={}", sig15(converged.sigma));
    println!("upper_M={}", sig15(bounds.upper_m));
    println!("concentric={}", sig15(bounds.concentric));
    println!("liminf_lower={}", sig15(bounds.liminf_lower));
    0
}

fn cmd_derivative(r1: f64, r2: f64, t: f64, tol: f64, n_max: usize) -> u8 {
    let annulus = match Annulus::new(r1, r2, t) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let converged = match solve_first_eigenvalue(&annulus, tol, n_max) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let derivative = if annulus.is_concentric() {
        // Even in the offset; the derivative vanishes by symmetry.
        0.0
    } else {
        let result = annulus.bipolar_frame().and_then(|frame| {
            smallest_eigpair(&finite_section(&frame, converged.n_final))
                .and_then(|eig| series_from_eigvec(&frame, &eig))
                .and_then(|s| s.normalize())
                .and_then(|s| shape_derivative(&s))
        });
        match result {
            Ok(d) => d,
            Err(e) => return fail(&e),
        }
    };
    println!("sigma={}", sig15(converged.sigma));
    println!("n_final={}", converged.n_final);
    println!("dsigma_dt={}", sig15(derivative));
    0
}

fn cmd_ladder(
    r1: f64,
    r2: f64,
    t: f64,
    tol: f64,
    n_max: usize,
    out: Option<&std::path::Path>,
) -> u8 {
    let annulus = match Annulus::new(r1, r2, t) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let frame = match annulus.bipolar_frame() {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let converged = match solve_first_eigenvalue(&annulus, tol, n_max) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let n0 = n0_threshold(&frame, sigma_cap(&annulus));
    let n_len = n0 + 240;
    let ladder = match coefficient_ladder(&annulus, &frame, converged.sigma, n_len) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    println!("sigma={}", sig15(ladder.sigma));
    println!("n0={}", ladder.n0);
    println!("L_inf={}", sig15(ladder.l_inf));
    println!("U_inf={}", sig15(ladder.u_inf));
    println!("F_1={}", sig15(ladder.f[0]));
    println!(
        "ratio_deviation_at_{}={}",
        n_len,
        sig((ladder.f[n_len - 1] - ladder.u_inf).abs(), 6)
    );
    if let Some(path) = out {
        let mut csv = String::from("n,T_n,F_n,L_n,U_n\n");
        for n in 1..=n_len {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                n,
                sig12(ladder.t[n - 1]),
                sig12(ladder.f[n - 1]),
                sig12(ladder.l[n - 1]),
                sig12(ladder.u[n - 1]),
            ));
        }
        if let Err(e) = fs::write(path, csv) {
            eprintln!("error: writing {}: {e}", path.display());
            return 1;
        }
    }
    0
}

fn cmd_verify(quick: bool) -> u8 {
    let results = verify::run_all(quick);
    let mut failed = false;
    for result in &results {
        match &result.outcome {
            Ok(()) => println!("check {}: PASS", result.name),
            Err(detail) => {
                failed = true;
                println!("check {}: FAIL ({detail})", result.name);
            }
        }
    }
    if failed {
        3
    } else {
        0
    }
}
