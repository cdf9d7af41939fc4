//! Figure and table reproductions keyed by identifier.

use crate::args::ReproduceArgs;
use crate::commands::legendre_options;
use crate::output::{col, num, pretty, Cell, Format, Table};
use crate::{usage, CliError, Job, Result};
use metrobound::dicke_bounds::{
    evolved_moment, experimental_moments, moments_from_state, optimal_precision, precision_vs_theta,
    reference_ground_state, second_moment_bound, simulated_precision, thermal_dicke_state,
};
use metrobound::gradient_bounds::{state_table, SpatialModel, TableState, TwoEnsembleState};
use metrobound::legendre_bounds::{
    self as lb, ellipsoid_max, qfi_lower_bound, ConstraintSet, LegendreOptions, FIDELITY_RECORDS,
};
use metrobound::spin_algebra::{collective_operator, ground_state_of, squeezing_ground_state, Axis, Basis, BasisKind, Operator};
use metrobound::tolerances::{self as tol, acceptance as acc};
use metrobound::{qfi_core, MetroError};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

pub const KEYS: [(&str, &str); 13] = [
    ("fig:vd-evolution-of-precision", "precision along θ for the N = 6 ground state: simulation vs closed form"),
    ("fig:vd-comparing-the-bounds", "closed-form precision vs QFI for squeezed ground states and thermal Dicke states"),
    ("fig:vd-precision-theta-experiment", "precision along θ for the N = 7900 measured moments"),
    ("fig:vd-experimental", "second-moment bound over (⟨J_y²⟩, ⟨J_x²⟩) and its slice at the measured ⟨J_y²⟩"),
    ("fig:lt-plots-for-fidelities", "QFI bound from GHZ and Dicke fidelities, N = 4 and 40"),
    ("fig:lt-nrange-fdicke", "QFI bound/N² from Dicke fidelities 0.2, 0.5, 0.7 for N up to 500"),
    ("fig:lt-spsq2d-4", "QFI bound over (⟨J_y⟩, Var(J_x)) for N = 4"),
    ("fig:lt-edge-diff", "Pezzè–Smerzi gap on boundary states, and the effect of a measured ⟨J_x⁴⟩"),
    ("fig:lt-bounds-on-symmetric-spin-squeezing", "rescaled symmetric bound vs N' for α = 0.85 and α = 0.5"),
    ("fig:assimpthotic", "extrapolated Dicke-experiment bound per particle vs N'"),
    ("table:lt-fidelities", "bounds per particle from published fidelities"),
    ("table:two-ensembles", "two-ensemble gradient bounds, closed form vs QFI matrix"),
    ("table:compare-all-states", "gradient bounds of the state table, closed form vs QFI matrix"),
];

/// Data produced for one key.
pub struct Repro {
    pub tables: Vec<Table>,
    pub params: Value,
}

struct Ctx {
    opts: LegendreOptions,
    n_prime_max: Option<usize>,
}

fn or_nan(r: metrobound::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), n).into_iter().map(|e| 10f64.powf(e)).collect()
}

fn pass_cell(ok: Option<bool>) -> Cell {
    match ok {
        Some(true) => "pass".into(),
        Some(false) => "FAIL".into(),
        None => "n/a".into(),
    }
}

pub fn run(a: &ReproduceArgs, job: &Job, format: Format) -> Result<String> {
    if a.list {
        return Ok(KEYS.iter().map(|(k, d)| format!("{k}\t{d}\n")).collect());
    }
    let key = a.key.as_deref().ok_or_else(|| usage("missing reproduction key (try --list)"))?;
    let ctx = Ctx { opts: legendre_options(None, job.seed), n_prime_max: a.n_prime_max };
    if key == "all" {
        let dir = a.out_dir.as_deref().ok_or_else(|| usage("reproduce all needs --out-dir"))?;
        for (k, _) in KEYS {
            let t0 = Instant::now();
            let r = produce(k, &ctx)?;
            write_dir(dir, k, &r, t0.elapsed().as_secs_f64(), job, format)?;
        }
        return Ok(String::new());
    }
    if !KEYS.iter().any(|(k, _)| *k == key) {
        return Err(usage(format!("unknown reproduction key '{key}' (try --list)")));
    }
    let t0 = Instant::now();
    let r = produce(key, &ctx)?;
    match &a.out_dir {
        Some(dir) => {
            write_dir(dir, key, &r, t0.elapsed().as_secs_f64(), job, format)?;
            Ok(String::new())
        }
        None => Ok(render(key, &r, format)),
    }
}

fn render(key: &str, r: &Repro, format: Format) -> String {
    match format {
        Format::Csv => r.tables.iter().map(Table::to_csv).collect(),
        Format::Json => pretty(&json!({
            "key": key,
            "parameters": r.params,
            "panels": r.tables.iter().map(Table::to_json).collect::<Vec<_>>(),
        })),
    }
}

fn file_stem(key: &str) -> String {
    key.replace(':', "-")
}

fn write_dir(dir: &Path, key: &str, r: &Repro, runtime: f64, job: &Job, format: Format) -> Result<()> {
    let write = |path: &Path, text: &str| {
        std::fs::write(path, text).map_err(|source| CliError::Write { path: path.into(), source })
    };
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
    let stem = file_stem(key);
    let mut files = Vec::new();
    for t in &r.tables {
        let (name, text) = match format {
            Format::Csv => (format!("{stem}-{}.csv", t.name), t.to_csv()),
            Format::Json => (format!("{stem}-{}.json", t.name), pretty(&t.to_json())),
        };
        write(&dir.join(&name), &text)?;
        log::info!("wrote {}", dir.join(&name).display());
        files.push(name);
    }
    let sidecar = json!({
        "key": key,
        "files": files,
        "parameters": r.params,
        "runtime_seconds": num(runtime),
        "seed": job.seed,
        "threads": rayon::current_num_threads(),
        "metrobound_version": env!("CARGO_PKG_VERSION"),
        "tolerances": manifest(),
    });
    write(&dir.join(format!("{stem}.json")), &pretty(&sidecar))
}

fn manifest() -> Value {
    json!({
        "manifest_version": tol::MANIFEST_VERSION,
        "mu_grid": tol::DEFAULT_MU_GRID,
        "mu_cert_rel": num(tol::MU_CERT_REL),
        "lambda_max_rel": num(tol::LAMBDA_MAX_REL),
        "r_step_rel": num(tol::R_STEP_REL),
        "r_max_evals": tol::R_MAX_EVALS,
        "feasibility_rel": num(tol::FEASIBILITY_REL),
        "gradient_table_abs": num(acc::GRADIENT_TABLE_ABS),
        "monotone_slack_rel": num(acc::MONOTONE_SLACK_REL),
    })
}

fn produce(key: &str, ctx: &Ctx) -> Result<Repro> {
    log::info!("reproducing {key}");
    match key {
        "fig:vd-evolution-of-precision" => vd_evolution(),
        "fig:vd-comparing-the-bounds" => vd_comparing(),
        "fig:vd-precision-theta-experiment" => vd_theta_experiment(),
        "fig:vd-experimental" => vd_experimental(),
        "fig:lt-plots-for-fidelities" => lt_fidelity_curves(ctx),
        "fig:lt-nrange-fdicke" => lt_nrange(ctx),
        "fig:lt-spsq2d-4" => lt_spsq2d(ctx),
        "fig:lt-edge-diff" => lt_edge_diff(ctx),
        "fig:lt-bounds-on-symmetric-spin-squeezing" => lt_symmetric_squeezing(ctx),
        "fig:assimpthotic" => lt_asymptotic(ctx),
        "table:lt-fidelities" => table_fidelities(ctx),
        "table:two-ensembles" => table_two_ensembles(),
        "table:compare-all-states" => table_compare_all(),
        _ => Err(usage(format!("unknown reproduction key '{key}'"))),
    }
}

fn vd_evolution() -> Result<Repro> {
    let n = 6;
    let nf = n as f64;
    let gs = reference_ground_state(n)?;
    let m = moments_from_state(&gs)?;
    let mut a = Table::new(
        "a",
        "precision along θ for the ground state of J_x² + J_y, N = 6",
        vec![
            col("theta", "rad", "phase angle"),
            col("simulated_per_n", "1/N", "(Δθ)^-2 / N from the evolved J_x² moments"),
            col("formula_per_n", "1/N", "(Δθ)^-2 / N from the closed form"),
            col("squared_difference", "1/N²", "squared difference of the two columns"),
        ],
    );
    let thetas = linspace(0.0, PI, 1001);
    let rows: Vec<(f64, f64)> = thetas
        .par_iter()
        .map(|&t| (or_nan(simulated_precision(&gs, t)) / nf, precision_vs_theta(&m, t) / nf))
        .collect();
    for (t, (s, f)) in thetas.iter().zip(rows) {
        a.push(vec![(*t).into(), s.into(), f.into(), ((s - f) * (s - f)).into()]);
    }
    let mut b = Table::new(
        "b",
        "second and fourth moments of J_x(θ) for the same state",
        vec![
            col("theta", "rad", "phase angle"),
            col("jx2", "ħ²", "⟨J_x(θ)²⟩"),
            col("jx4", "ħ⁴", "⟨J_x(θ)⁴⟩"),
        ],
    );
    let thetas = linspace(-PI, PI, 401);
    let rows: Vec<(f64, f64)> = thetas
        .par_iter()
        .map(|&t| (or_nan(evolved_moment(&gs, 2, t)), or_nan(evolved_moment(&gs, 4, t))))
        .collect();
    for (t, (x2, x4)) in thetas.iter().zip(rows) {
        b.push(vec![(*t).into(), x2.into(), x4.into()]);
    }
    Ok(Repro { tables: vec![a, b], params: json!({"n": n, "hamiltonian": "J_x^2 + J_y"}) })
}

fn vd_comparing() -> Result<Repro> {
    let n = 10;
    let nf = n as f64;
    let basis = Basis::symmetric(n, 0.5)?;
    let jz = collective_operator(Axis::Z, basis)?;
    let jy = collective_operator(Axis::Y, basis)?;
    let lambdas = logspace(1e-3, 1e3, 61);
    let rows: Vec<metrobound::Result<[f64; 4]>> = lambdas
        .par_iter()
        .map(|&l| {
            let st = squeezing_ground_state(n, l, 1.0, basis)?.state;
            let pol = st.expect(&jy)? / (nf / 2.0);
            let bound = or_nan(moments_from_state(&st).and_then(|m| optimal_precision(&m).map(|p| p.0)));
            Ok([l, pol, bound / nf, qfi_core::qfi(&st, &jz)? / nf])
        })
        .collect();
    let mut a = Table::new(
        "a",
        "ground states of J_x² - λJ_y, N = 10",
        vec![
            col("lambda", "-", "field strength λ"),
            col("polarization", "N/2", "⟨J_y⟩ / (N/2)"),
            col("bound_per_n", "1/N", "optimal (Δθ)^-2 / N from the moments"),
            col("qfi_per_n", "1/N", "F_Q[ρ, J_z] / N"),
        ],
    );
    for r in rows {
        a.push(r?.iter().map(|&v| v.into()).collect());
    }
    let temps = linspace(0.0, 10.0, 41);
    let rows: Vec<metrobound::Result<[f64; 3]>> = temps
        .par_iter()
        .map(|&t| {
            let st = thermal_dicke_state(n, t, basis)?;
            let bound = or_nan(moments_from_state(&st).and_then(|m| optimal_precision(&m).map(|p| p.0)));
            Ok([t, bound / nf, qfi_core::qfi(&st, &jz)? / nf])
        })
        .collect();
    let mut b = Table::new(
        "b",
        "Gaussian mixtures of x-Dicke states, N = 10",
        vec![
            col("temperature", "-", "width T of the weights exp(-(n-N/2)²/T)"),
            col("bound_per_n", "1/N", "optimal (Δθ)^-2 / N from the moments"),
            col("qfi_per_n", "1/N", "F_Q[ρ, J_z] / N"),
        ],
    );
    for r in rows {
        b.push(r?.iter().map(|&v| v.into()).collect());
    }
    Ok(Repro { tables: vec![a, b], params: json!({"n": n}) })
}

fn vd_theta_experiment() -> Result<Repro> {
    let m = experimental_moments();
    let nf = m.n as f64;
    let (best, theta_opt) = optimal_precision(&m)?;
    let mut t = Table::new(
        "a",
        "precision along θ for the measured moments, N = 7900",
        vec![col("theta", "rad", "phase angle"), col("precision_per_n", "1/N", "(Δθ)^-2 / N; 1 is the shot-noise limit")],
    );
    for th in linspace(0.0, 0.03, 601) {
        t.push(vec![th.into(), (precision_vs_theta(&m, th) / nf).into()]);
    }
    Ok(Repro {
        tables: vec![t],
        params: json!({"moments": m, "theta_opt": num(theta_opt), "optimal_per_n": num(best / nf)}),
    })
}

fn vd_experimental() -> Result<Repro> {
    let m = experimental_moments();
    let n = m.n;
    let nf = n as f64;
    let beta = tol::DEFAULT_BETA;
    let shell = nf / 2.0 * (nf / 2.0 + 1.0);
    let mut a = Table::new(
        "a",
        "second-moment bound per particle, N = 7900, β = 3",
        vec![
            col("jy2_normalized", "J(J+1)", "⟨J_y²⟩ / (N/2)(N/2+1)"),
            col("jx2", "ħ²", "⟨J_x²⟩"),
            col("bound_per_n", "1/N", "lower bound on (Δθ)^-2 / N; nan where the bound does not apply"),
        ],
    );
    for y in linspace(0.30, 0.50, 41) {
        for x in linspace(0.0, 400.0, 41) {
            a.push(vec![y.into(), x.into(), (or_nan(second_moment_bound(x, y * shell, n, beta)) / nf).into()]);
        }
    }
    let mut b = Table::new(
        "b",
        "slice at the measured ⟨J_y²⟩ = 6e6",
        vec![col("jx2", "ħ²", "⟨J_x²⟩"), col("bound_per_n", "1/N", "lower bound on (Δθ)^-2 / N")],
    );
    for x in linspace(1.0, 400.0, 400) {
        b.push(vec![x.into(), (or_nan(second_moment_bound(x, m.jy2, n, beta)) / nf).into()]);
    }
    let at = second_moment_bound(m.jx2, m.jy2, n, beta)? / nf;
    Ok(Repro {
        tables: vec![a, b],
        params: json!({"n": n, "beta": beta, "measured_jx2": m.jx2, "measured_jy2": m.jy2, "measured_bound_per_n": num(at)}),
    })
}

fn lt_fidelity_curves(ctx: &Ctx) -> Result<Repro> {
    let mut a = Table::new(
        "a",
        "QFI bound from the GHZ fidelity, normalized by N² (independent of N)",
        vec![col("fidelity", "-", "F_GHZ"), col("bound_over_n2", "1/N²", "lower bound on F_Q[ρ, J_z] / N²")],
    );
    for f in linspace(0.0, 1.0, 101) {
        a.push(vec![f.into(), (lb::ghz_fidelity_bound(f, 4)? / 16.0).into()]);
    }
    let mut b = Table::new(
        "b",
        "QFI bound from the fidelity with the x-Dicke state, N = 4 and 40",
        vec![
            col("n", "-", "particle number"),
            col("fidelity", "-", "F_Dicke"),
            col("bound_over_n2", "1/N²", "lower bound on F_Q[ρ, J_z] / N²"),
        ],
    );
    let pts: Vec<(usize, f64)> =
        [4usize, 40].iter().flat_map(|&n| linspace(0.0, 1.0, 51).into_iter().map(move |f| (n, f))).collect();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&(n, f)| or_nan(lb::dicke_fidelity_bound_with(f, n, &ctx.opts).map(|r| r.bound)) / (n * n) as f64)
        .collect();
    for ((n, f), v) in pts.into_iter().zip(vals) {
        b.push(vec![n.into(), f.into(), v.into()]);
    }
    Ok(Repro { tables: vec![a, b], params: json!({"n_values": [4, 40]}) })
}

fn lt_nrange(ctx: &Ctx) -> Result<Repro> {
    let ns = [50usize, 100, 200, 300, 400, 500];
    let fs = [0.2, 0.5, 0.7];
    let pts: Vec<(usize, f64)> = fs.iter().flat_map(|&f| ns.iter().map(move |&n| (n, f))).collect();
    let vals: Vec<metrobound::Result<f64>> = pts
        .par_iter()
        .map(|&(n, f)| {
            log::info!("Dicke fidelity {f} at N = {n}");
            lb::dicke_fidelity_bound_with(f, n, &ctx.opts).map(|r| r.bound / (n * n) as f64)
        })
        .collect();
    let mut t = Table::new(
        "a",
        "QFI bound from Dicke fidelities for large N",
        vec![
            col("fidelity", "-", "F_Dicke"),
            col("n", "-", "particle number"),
            col("bound_over_n2", "1/N²", "lower bound on F_Q[ρ, J_z] / N²"),
        ],
    );
    for ((n, f), v) in pts.into_iter().zip(vals) {
        t.push(vec![f.into(), n.into(), v?.into()]);
    }
    Ok(Repro { tables: vec![t], params: json!({"n_values": ns, "fidelities": fs}) })
}

/// Smallest ⟨target⟩ over states with ⟨ops[k]⟩ = vals[k], from the dual
/// max_λ [λ·w + E₀(target - Σλ_k ops[k])]. Infeasible values give a
/// result above the top of the target spectrum.
pub fn expectation_floor(target: &Operator, ops: &[Operator], vals: &[f64]) -> Result<f64> {
    let mut err = None;
    let mut f = |lam: &[f64]| {
        let mut h = target.clone();
        for (l, op) in lam.iter().zip(ops) {
            h = h.minus(&op.scale(*l)).expect("same basis");
        }
        match ground_state_of(&h, false) {
            Ok(gs) => {
                let lw: f64 = lam.iter().zip(vals).map(|(l, w)| l * w).sum();
                let g = ops.iter().zip(vals).map(|(op, w)| w - gs.state.expect(op).unwrap_or(*w)).collect();
                (lw + gs.energy, g)
            }
            Err(e) => {
                err = Some(e);
                (f64::NEG_INFINITY, vec![0.0; ops.len()])
            }
        }
    };
    let out = ellipsoid_max(&mut f, vec![0.0; ops.len()], 1e4, 1e-10, 4000);
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(out.value)
}

/// Interval of ⟨target⟩ compatible with the constraints, or None when the
/// constraints themselves cannot be met.
pub fn expectation_range(target: &Operator, ops: &[Operator], vals: &[f64]) -> Result<Option<(f64, f64)>> {
    let lo = expectation_floor(target, ops, vals)?;
    let hi = -expectation_floor(&target.scale(-1.0), ops, vals)?;
    let slack = 1e-7 * (1.0 + lo.abs().max(hi.abs()));
    Ok((lo <= hi + slack).then_some((lo, hi)))
}

fn full_bound(ops: Vec<Operator>, vals: Vec<f64>, g: &Operator, opts: &LegendreOptions) -> f64 {
    or_nan(ConstraintSet::new(ops, vals).and_then(|cs| qfi_lower_bound(&cs, g, opts)).map(|r| r.bound))
}

fn lt_spsq2d(ctx: &Ctx) -> Result<Repro> {
    let n = 4;
    let nf = n as f64;
    let basis = Basis::qubits(n, BasisKind::Full)?;
    let [jx, jy, jz] = [Axis::X, Axis::Y, Axis::Z].map(|a| collective_operator(a, basis));
    let (jx, jy, jz) = (jx?, jy?, jz?);
    let jx2 = jx.square();
    let mut pts = Vec::new();
    for y in linspace(0.0, 2.0, 21) {
        for v in linspace(0.0, 4.0, 21) {
            pts.push((y, v));
        }
    }
    let ranges: Vec<Result<Option<(f64, f64)>>> = linspace(0.0, 2.0, 21)
        .par_iter()
        .map(|&y| expectation_range(&jx2, std::slice::from_ref(&jy), &[y]))
        .collect();
    let ranges = ranges.into_iter().collect::<Result<Vec<_>>>()?;
    let rows: Vec<(bool, f64, f64)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, &(y, v))| {
            let slack = 1e-9;
            let feasible = ranges[i / 21].is_some_and(|(lo, hi)| v >= lo - slack && v <= hi + slack);
            if !feasible {
                return (false, f64::NAN, f64::NAN);
            }
            let b = full_bound(vec![jy.clone(), jx2.clone()], vec![y, v], &jz, &ctx.opts);
            let ps = or_nan(qfi_core::pezze_smerzi_bound(y, v));
            (true, b / nf, ps / nf)
        })
        .collect();
    let mut t = Table::new(
        "a",
        "QFI bound from ⟨J_y⟩ and Var(J_x) with ⟨J_x⟩ = 0, N = 4, any permutation symmetry",
        vec![
            col("mean_jy", "ħ", "⟨J_y⟩"),
            col("var_jx", "ħ²", "Var(J_x) = ⟨J_x²⟩"),
            col("physical", "-", "whether some state has these values"),
            col("bound_per_n", "1/N", "lower bound on F_Q[ρ, J_z] / N; values above 1 beat shot noise"),
            col("pezze_smerzi_per_n", "1/N", "⟨J_y⟩² / Var(J_x) / N"),
        ],
    );
    for ((y, v), (ok, b, ps)) in pts.into_iter().zip(rows) {
        t.push(vec![y.into(), v.into(), ok.into(), b.into(), ps.into()]);
    }
    Ok(Repro { tables: vec![t], params: json!({"n": n, "basis": "full"}) })
}

fn lt_edge_diff(ctx: &Ctx) -> Result<Repro> {
    let ns = [4usize, 6, 10, 20];
    let lambdas = logspace(1e-2, 1e2, 33);
    let pts: Vec<(usize, f64)> = ns.iter().flat_map(|&n| lambdas.iter().map(move |&l| (n, l))).collect();
    let rows: Vec<metrobound::Result<lb::BoundaryPoint>> =
        pts.par_iter().map(|&(n, l)| lb::squeezing_boundary_point(n, l, &ctx.opts)).collect();
    let mut a = Table::new(
        "a",
        "relative gap between the optimal bound and Pezzè–Smerzi on ground states of J_x² - λJ_y",
        vec![
            col("n", "-", "particle number"),
            col("lambda", "-", "field strength λ"),
            col("polarization", "N/2", "⟨J_y⟩ / (N/2)"),
            col("bound", "-", "optimal lower bound on F_Q[ρ, J_z]"),
            col("pezze_smerzi", "-", "⟨J_y⟩² / Var(J_x)"),
            col("relative_gap", "-", "(bound - pezze_smerzi) / bound"),
        ],
    );
    for r in rows {
        let p = r?;
        a.push(vec![
            p.n.into(),
            p.lambda.into(),
            (p.mean_jy / (p.n as f64 / 2.0)).into(),
            p.bound.into(),
            p.pezze_smerzi.into(),
            p.relative_gap().into(),
        ]);
    }

    let (n, mean_jy, var_jx) = (4, 1.5, 0.567);
    let full = Basis::qubits(n, BasisKind::Full)?;
    let jx = collective_operator(Axis::X, full)?;
    let jy = collective_operator(Axis::Y, full)?;
    let jz = collective_operator(Axis::Z, full)?;
    let (jx2, jx4) = (jx.square(), jx.pow(4));
    let two = full_bound(vec![jy.clone(), jx2.clone()], vec![mean_jy, var_jx], &jz, &ctx.opts);
    let sym = or_nan(lb::spin_squeezing_bound(mean_jy, var_jx, n, false, None, &ctx.opts).map(|r| r.bound));
    let (lo, hi) = expectation_range(&jx4, &[jy.clone(), jx2.clone()], &[mean_jy, var_jx])?
        .ok_or_else(|| MetroError::Infeasible("⟨J_y⟩ = 1.5, Var(J_x) = 0.567 is not physical".into()))?;
    let grid = linspace(lo, hi, 41);
    let vals: Vec<f64> = grid
        .par_iter()
        .map(|&w| full_bound(vec![jy.clone(), jx2.clone(), jx4.clone()], vec![mean_jy, var_jx, w], &jz, &ctx.opts))
        .collect();
    let mut b = Table::new(
        "b",
        "QFI bound at ⟨J_y⟩ = 1.5, Var(J_x) = 0.567, N = 4 as a function of ⟨J_x⁴⟩",
        vec![
            col("jx4", "ħ⁴", "measured ⟨J_x⁴⟩"),
            col("bound_with_jx4", "-", "lower bound on F_Q[ρ, J_z] using ⟨J_x⁴⟩"),
            col("bound_without_jx4", "-", "lower bound from ⟨J_y⟩ and Var(J_x) only"),
            col("bound_symmetric", "-", "lower bound from ⟨J_y⟩ and Var(J_x) for symmetric states"),
        ],
    );
    for (w, v) in grid.into_iter().zip(vals) {
        b.push(vec![w.into(), v.into(), two.into(), sym.into()]);
    }
    Ok(Repro {
        tables: vec![a, b],
        params: json!({"n_values": ns, "panel_b": {"n": n, "mean_jy": mean_jy, "var_jx": var_jx}}),
    })
}

fn sweep_primes(ctx: &Ctx, default_max: usize) -> Vec<usize> {
    lb::default_n_primes(ctx.n_prime_max.unwrap_or(default_max))
}

fn lt_symmetric_squeezing(ctx: &Ctx) -> Result<Repro> {
    let xi2 = 0.1514;
    let primes = sweep_primes(ctx, 200);
    let mut tables = Vec::new();
    for (name, alpha) in [("a", 0.85), ("b", 0.5)] {
        let mut t = Table::new(
            name,
            format!("rescaled symmetric bound per particle, α = {alpha}, ξ² = {xi2}"),
            vec![
                col("n_prime", "-", "particle number N' of the symmetric problem"),
                col("bound_per_n", "1/N'", "lower bound on F_Q / N'; nan where the moments do not fit N'"),
                col("pezze_smerzi_per_n", "1/N'", "1/ξ²"),
                col("converged", "-", "whether the optimizer met its tolerance"),
            ],
        );
        let mut warm: Option<Vec<f64>> = None;
        for &np in &primes {
            log::info!("α = {alpha}, N' = {np}");
            let mut o = ctx.opts.clone();
            if let Some(w) = &warm {
                o = o.with_warm_start(w.clone()).with_random_starts(0);
            }
            match lb::squeezing_scaled_per_particle(np, alpha, xi2, &o) {
                Ok(r) => {
                    warm = Some(r.r_star.clone());
                    t.push(vec![np.into(), r.bound.into(), (1.0 / xi2).into(), r.converged.into()]);
                }
                Err(e) if e.is_infeasible() => {
                    t.push(vec![np.into(), f64::NAN.into(), (1.0 / xi2).into(), false.into()]);
                }
                Err(e) => return Err(e.into()),
            }
        }
        tables.push(t);
    }
    Ok(Repro { tables, params: json!({"xi2": xi2, "alpha": [0.85, 0.5], "n_primes": primes}) })
}

fn lt_asymptotic(ctx: &Ctx) -> Result<Repro> {
    let primes = sweep_primes(ctx, acc::DICKE_EXPERIMENT_NPRIME_MAX);
    let (jy2, jx2, n) = (112.0, 6e6, 7900);
    let sweep = lb::dicke_experiment_sweep(jy2, jx2, n, &primes, &ctx.opts)?;
    let mut t = Table::new(
        "a",
        "extrapolated bound per particle for the N = 7900 Dicke experiment",
        vec![
            col("n_prime", "-", "particle number N' of the symmetric problem"),
            col("bound_sym", "-", "lower bound on F_Q for N' symmetric qubits"),
            col("bound_per_n", "1/N", "bound rescaled to N = 7900, divided by N"),
            col("converged", "-", "whether the optimizer met its tolerance"),
        ],
    );
    for p in &sweep.points {
        t.push(vec![p.n_prime.into(), p.bound_sym.into(), p.per_particle.into(), p.converged.into()]);
    }
    Ok(Repro {
        tables: vec![t],
        params: json!({
            "n": n, "jy2": jy2, "jx2_eq_jz2": jx2,
            "gamma": num(sweep.gamma), "jy2_sym": num(sweep.jy2_sym),
            "monotone": sweep.is_monotone(acc::MONOTONE_SLACK_REL),
        }),
    })
}

fn table_fidelities(ctx: &Ctx) -> Result<Repro> {
    let vals: Vec<metrobound::Result<f64>> =
        FIDELITY_RECORDS.par_iter().map(|r| r.bound_per_particle(&ctx.opts)).collect();
    let mut t = Table::new(
        "a",
        "QFI bound per particle from published fidelities",
        vec![
            col("system", "-", "experimental platform"),
            col("target", "-", "target state of the fidelity"),
            col("n", "-", "particle number"),
            col("fidelity", "-", "measured fidelity"),
            col("reported", "1/N", "published bound / N"),
            col("reported_err", "1/N", "published uncertainty; 0 means none was given"),
            col("computed", "1/N", "recomputed bound / N"),
            col("deviation", "1/N", "computed - reported"),
            col("pass", "-", "whether |deviation| is within the published interval (last digit if none)"),
        ],
    );
    for (r, v) in FIDELITY_RECORDS.iter().zip(vals) {
        let v = v?;
        let dev = v - r.reported;
        let target = match r.target {
            lb::FidelityTarget::Dicke => "dicke",
            lb::FidelityTarget::Ghz => "ghz",
        };
        t.push(vec![
            r.system.into(),
            target.into(),
            r.n.into(),
            r.fidelity.into(),
            r.reported.into(),
            r.reported_err.into(),
            v.into(),
            dev.into(),
            pass_cell(Some(dev.abs() <= r.tolerance())),
        ]);
    }
    Ok(Repro { tables: vec![t], params: json!({"rows": FIDELITY_RECORDS.len()}) })
}

fn table_two_ensembles() -> Result<Repro> {
    let (a, n, j) = (1.0, 4, 0.5);
    let states = [
        (TwoEnsembleState::Polarized, "polarized", "2a²Nj"),
        (TwoEnsembleState::Ghz, "ghz", "a²N²/2"),
        (TwoEnsembleState::Dicke, "dicke", "a²N(N+4)/4"),
        (TwoEnsembleState::BestSeparable, "best-separable", "4a²Nj²"),
    ];
    let vals: Vec<metrobound::Result<f64>> = states.par_iter().map(|(s, _, _)| s.numeric(a, n, j)).collect();
    let mut t = Table::new(
        "a",
        "two ensembles at x = ±a/2, same product state in each, N = 4, j = 1/2, a = 1",
        vec![
            col("state", "-", "state of each ensemble"),
            col("formula", "-", "closed form of the bound"),
            col("closed_form", "a²", "closed form evaluated"),
            col("numeric", "a²", "bound from the QFI matrix of the joint state"),
            col("abs_diff", "a²", "|numeric - closed_form|"),
            col("pass", "-", "abs_diff within the gradient table tolerance"),
        ],
    );
    for ((s, name, formula), v) in states.iter().zip(vals) {
        let v = v?;
        let cf = s.closed_form(a, n, j);
        let d = (v - cf).abs();
        t.push(vec![
            (*name).into(),
            (*formula).into(),
            cf.into(),
            v.into(),
            d.into(),
            pass_cell(Some(d <= acc::GRADIENT_TABLE_ABS)),
        ]);
    }
    Ok(Repro { tables: vec![t], params: json!({"a": a, "n": n, "j": j, "tolerance": acc::GRADIENT_TABLE_ABS}) })
}

fn table_compare_all() -> Result<Repro> {
    let (mu, sigma2, eta) = (0.0, 1.0, 0.1);
    let spatial = SpatialModel::moments(mu, sigma2, eta)?;
    let cases = [(4usize, 0.5), (6, 0.5), (4, 1.0), (6, 1.0)];
    let tables: Vec<metrobound::Result<Vec<metrobound::gradient_bounds::TableRow>>> =
        cases.par_iter().map(|&(n, j)| state_table(&spatial, n, j)).collect();
    let mut t = Table::new(
        "a",
        "gradient bounds for the moment model μ = 0, σ² = 1, η = 0.1",
        vec![
            col("n", "-", "particle number"),
            col("j", "-", "single-particle spin"),
            col("state", "-", "spin state"),
            col("closed_form", "-", "closed-form bound"),
            col("numeric", "-", "bound from the QFI matrix"),
            col("saturable", "-", "whether the closed form holds with equality"),
            col("pass", "-", "|numeric - closed_form| within the gradient table tolerance"),
        ],
    );
    for ((n, j), rows) in cases.iter().zip(tables) {
        let rows = rows?;
        for s in TableState::ALL {
            let Some(r) = rows.iter().find(|r| r.state == s) else {
                t.push(vec![(*n).into(), (*j).into(), s.name().into(), f64::NAN.into(), f64::NAN.into(), s.saturable().into(), pass_cell(None)]);
                continue;
            };
            let numeric = r.numeric.unwrap_or(f64::NAN);
            let ok = r.deviation().map(|d| d <= acc::GRADIENT_TABLE_ABS);
            t.push(vec![(*n).into(), (*j).into(), s.name().into(), r.closed_form.into(), numeric.into(), r.saturable.into(), pass_cell(ok)]);
        }
    }
    Ok(Repro {
        tables: vec![t],
        params: json!({"mu": mu, "sigma2": sigma2, "eta": eta, "cases": cases, "tolerance": acc::GRADIENT_TABLE_ABS}),
    })
}
