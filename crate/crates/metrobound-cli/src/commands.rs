use crate::args::*;
use crate::output::{num, Record};
use crate::{usage, Result};
use metrobound::dicke_bounds::{
    experimental_moments, gaussian_resample, optimal_precision, precision_vs_theta, second_moment_bound,
    thermal_dicke_state, DickeMoments,
};
use metrobound::gradient_bounds::{gradient_bound, SpatialModel, TableState};
use metrobound::legendre_bounds::{self as lb, BoundResult, LegendreOptions};
use metrobound::spin_algebra::{
    collective_operator, dicke_state, ghz_state, pi_singlet_in, polarized_state, squeezing_ground_state, Axis, Basis,
    BasisKind, QuantumState,
};
use metrobound::{qfi_core, tolerances as tol, MetroError};
use serde_json::Value;

/// Measured standard deviations of the N = 7900 experiment.
pub const EXPERIMENT_SIGMAS: [f64; 4] = [31.0, 22e3, 0.6e6, 0.8e13];

fn axis(a: AxisArg) -> Axis {
    match a {
        AxisArg::X => Axis::X,
        AxisArg::Y => Axis::Y,
        AxisArg::Z => Axis::Z,
    }
}

fn generator_axis(g: Generator) -> Axis {
    match g {
        Generator::Jx => Axis::X,
        Generator::Jy => Axis::Y,
        Generator::Jz => Axis::Z,
    }
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("missing --{name}")))
}

pub fn build_state(a: &QfiArgs) -> Result<QuantumState> {
    let j = a.j.unwrap_or(0.5);
    let kind = match a.basis {
        Some(BasisArg::Full) => BasisKind::Full,
        Some(BasisArg::Symmetric) => BasisKind::Symmetric,
        None if a.state == StateKind::Singlet => BasisKind::Full,
        None => BasisKind::Symmetric,
    };
    let basis = match kind {
        BasisKind::Full => Basis::full(a.n, j)?,
        BasisKind::Symmetric => Basis::symmetric(a.n, j)?,
    };
    let ax = axis(a.axis.unwrap_or(AxisArg::X));
    let state = match a.state {
        StateKind::Dicke => dicke_state(a.n, a.excitations.unwrap_or(a.n / 2), ax, basis)?,
        StateKind::Ghz => ghz_state(a.n, basis)?,
        StateKind::Polarized => polarized_state(a.n, j, ax, basis)?,
        StateKind::Singlet => pi_singlet_in(basis)?,
        StateKind::Squeezed => {
            let sym = Basis::symmetric(a.n, j)?;
            let gs = squeezing_ground_state(a.n, a.lambda.unwrap_or(1.0), 1.0, sym)?.state;
            if kind == BasisKind::Full { gs.to_full()? } else { gs }
        }
        StateKind::Thermal => {
            let sym = Basis::symmetric(a.n, j)?;
            let st = thermal_dicke_state(a.n, a.temperature.unwrap_or(1.0), sym)?;
            if kind == BasisKind::Full { st.to_full()? } else { st }
        }
        StateKind::Mixed => QuantumState::maximally_mixed(basis)?,
    };
    Ok(state)
}

pub fn qfi(a: &QfiArgs) -> Result<Record> {
    let state = build_state(a)?;
    let g = collective_operator(generator_axis(a.generator.unwrap_or(Generator::Jz)), state.basis())?;
    Ok(Record::new().num("qfi", qfi_core::qfi(&state, &g)?))
}

pub fn dicke_moments(a: &DickeBoundArgs) -> Result<Option<DickeMoments>> {
    if a.experimental {
        return Ok(Some(experimental_moments()));
    }
    let (Some(jx4), Some(jy4)) = (a.jx4, a.jy4) else {
        return Ok(None);
    };
    let (n, jx2, jy2) = (need(a.n, "n")?, need(a.jx2, "jx2")?, need(a.jy2, "jy2")?);
    let m = DickeMoments {
        n,
        jx2,
        jx4,
        jy2,
        jy4,
        jz2: a.jz2.unwrap_or(jy2),
        jxjy2jx: a.jxjy2jx.unwrap_or(0.0),
        jxjy2jx_is_bounded: false,
        parity_ok: true,
    };
    m.validate()?;
    Ok(Some(if a.jxjy2jx.is_some() { m } else { m.with_bounded_cross() }))
}

pub fn dicke_bound(a: &DickeBoundArgs) -> Result<Record> {
    let beta = a.beta.unwrap_or(tol::DEFAULT_BETA);
    let moments = dicke_moments(a)?;
    let (n, jx2, jy2) = match &moments {
        Some(m) => (m.n, m.jx2, m.jy2),
        None => (need(a.n, "n")?, need(a.jx2, "jx2")?, need(a.jy2, "jy2")?),
    };
    let nf = n as f64;
    let mut rec = Record::new().value("n", Value::from(n));
    if let Some(m) = &moments {
        let (best, theta) = optimal_precision(m)?;
        rec = rec
            .num("optimal_precision", best)
            .num("optimal_per_particle", best / nf)
            .num("theta_opt", theta)
            .value("cross_term_bounded", Value::from(m.jxjy2jx_is_bounded));
        if let Some(t) = a.theta {
            rec = rec.num("precision_at_theta", precision_vs_theta(m, t));
        }
    } else if a.theta.is_some() {
        return Err(usage("--theta needs --jx4 and --jy4"));
    }
    let second = second_moment_bound(jx2, jy2, n, beta)?;
    Ok(rec.num("second_moment_bound", second).num("second_moment_per_particle", second / nf).num("beta", beta))
}

pub fn legendre_options(mu_grid: Option<usize>, seed: u64) -> LegendreOptions {
    let mut o = LegendreOptions::default();
    if let Some(g) = mu_grid {
        o.mu_grid = g;
    }
    o.seed = tol::R_SEED.wrapping_add(seed);
    o
}

fn bound_record(res: &BoundResult, n: usize) -> Record {
    Record::new()
        .num("bound", res.bound)
        .num("per_particle", res.bound / n as f64)
        .value("converged", Value::from(res.converged))
        .value("r_star", Value::Array(res.r_star.iter().map(|&x| num(x)).collect()))
        .num("mu_star", res.mu_star)
}

pub fn legendre_bound(a: &LegendreBoundArgs, seed: u64) -> Result<Record> {
    let opts = legendre_options(a.mu_grid, seed);
    match a.scenario {
        Scenario::GhzFidelity => {
            let (n, f) = (need(a.n, "n")?, need(a.fidelity, "fidelity")?);
            let res = lb::ghz_fidelity_bound_numeric(f, n, &opts)?;
            Ok(bound_record(&res, n).num("closed_form", lb::ghz_fidelity_bound(f, n)?))
        }
        Scenario::DickeFidelity => {
            let (n, f) = (need(a.n, "n")?, need(a.fidelity, "fidelity")?);
            let res = lb::dicke_fidelity_bound_with(f, n, &opts)?;
            Ok(bound_record(&res, n))
        }
        Scenario::Squeezing => {
            let (n, jy, vx) = (need(a.n, "n")?, need(a.mean_jy, "mean-jy")?, need(a.var_jx, "var-jx")?);
            let res = lb::spin_squeezing_bound(jy, vx, n, a.jx_zero, a.jx4, &opts)?;
            Ok(bound_record(&res, n).num("pezze_smerzi", qfi_core::pezze_smerzi_bound(jy, vx)?))
        }
        Scenario::SqueezingScaled => {
            let n = need(a.n_prime, "n-prime")?;
            let (alpha, xi2) = (need(a.alpha, "alpha")?, need(a.xi2, "xi2")?);
            let res = lb::squeezing_scaled_per_particle(n, alpha, xi2, &opts)?;
            Ok(Record::new()
                .num("per_particle", res.bound)
                .num("pezze_smerzi_per_particle", 1.0 / xi2)
                .value("converged", Value::from(res.converged)))
        }
        Scenario::DickeExperiment => {
            let n = a.n.unwrap_or(7900);
            let jy2 = a.jy2.unwrap_or(112.0);
            let jx2 = a.jx2.unwrap_or(6e6);
            let max = a.n_prime_max.unwrap_or(tol::acceptance::DICKE_EXPERIMENT_NPRIME_MAX);
            let sweep = lb::dicke_experiment_sweep(jy2, jx2, n, &lb::default_n_primes(max), &opts)?;
            let last = sweep.points.last().expect("non-empty sweep");
            Ok(Record::new()
                .num("gamma", sweep.gamma)
                .num("per_particle", sweep.per_particle())
                .num("bound", sweep.per_particle() * n as f64)
                .value("n_prime", Value::from(last.n_prime))
                .value("monotone", Value::from(sweep.is_monotone(tol::acceptance::MONOTONE_SLACK_REL)))
                .value("converged", Value::from(sweep.points.iter().all(|p| p.converged))))
        }
    }
}

pub fn spatial_model(a: &GradientBoundArgs) -> Result<SpatialModel> {
    Ok(match &a.positions {
        Some(p) => {
            if p.len() != a.n {
                return Err(usage(format!("{} positions for N = {}", p.len(), a.n)));
            }
            SpatialModel::deterministic(p.clone())?
        }
        None => SpatialModel::moments(a.mu.unwrap_or(0.0), need(a.sigma2, "sigma2")?, a.eta.unwrap_or(0.0))?,
    })
}

pub fn gradient_bound_record(a: &GradientBoundArgs) -> Result<Record> {
    let j = a.j.unwrap_or(0.5);
    let state: TableState = a.state.parse()?;
    let spatial = spatial_model(a)?;
    spatial.validate(a.n)?;
    if !state.applies(a.n, j) {
        return Err(MetroError::InvalidInput(format!("{} is not defined for N = {}, j = {j}", a.state, a.n)).into());
    }
    let g = gradient_bound(&state.state(a.n, j)?, &spatial)?;
    let m = g.qfi_matrix;
    let matrix = Value::Array((0..2).map(|i| Value::Array((0..2).map(|k| num(m.get(i, k))).collect())).collect());
    Ok(Record::new().num("bound", g.value).value("saturable", Value::from(g.saturable)).value("qfi_matrix", matrix))
}

pub fn resample(a: &ResampleArgs, seed: u64) -> Result<Record> {
    let n = a.n.unwrap_or(7900);
    let exp = experimental_moments();
    let means = a.means.clone().unwrap_or_else(|| vec![exp.jx2, exp.jx4, exp.jy2, exp.jy4]);
    let sigmas = a.sigmas.clone().unwrap_or_else(|| EXPERIMENT_SIGMAS.to_vec());
    if means.len() != 4 || sigmas.len() != 4 {
        return Err(usage("--means and --sigmas take four values: jx2, jx4, jy2, jy4"));
    }
    let draws = a.draws.unwrap_or(10_000);
    if draws == 0 {
        return Err(usage("--draws must be positive"));
    }
    let target = a.target.unwrap_or_default();
    let beta = a.beta.unwrap_or(tol::DEFAULT_BETA);
    let summary = gaussian_resample(&means, &sigmas, draws, seed, |x| match target {
        ResampleTarget::OptimalPrecision => {
            let m = DickeMoments::x_invariant(n, x[0], x[1], x[2], x[3])?;
            Ok(optimal_precision(&m)?.0)
        }
        ResampleTarget::SecondMoment => second_moment_bound(x[0], x[2], n, beta),
    })?;
    let nf = n as f64;
    Ok(Record::new()
        .value("draws", Value::from(summary.draws))
        .value("failures", Value::from(summary.failures))
        .num("mean", summary.mean)
        .num("std", summary.std)
        .num("p16", summary.p16)
        .num("p50", summary.p50)
        .num("p84", summary.p84)
        .num("mean_per_particle", summary.mean / nf)
        .num("std_per_particle", summary.std / nf))
}
