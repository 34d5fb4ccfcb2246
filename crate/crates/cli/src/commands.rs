use std::path::Path;

use qmeas::measurement::{measurement_probabilities, post_measurement_state, DegenerateRotation, SpectralObservable};
use qmeas::position::{
    appendix_d_moments, packet_momentum_density, packet_position_density_ideal, renormalization_constant,
    renormalization_excess,
    survival_position_gaussian, uncertainty_product, w_curve, ExactPositionDensity, GaussianPacket, EPS0_WARNING,
};
use qmeas::quad::Adaptive;
use qmeas::rhs::{CellGrid, CellKind};
use qmeas::scattering::{
    double_limit_probe, lippmann_schwinger_iterate, scattered_state, transition_amplitudes,
    wave_operators_and_s_matrix, BandFamily, ScatteringModel,
};
use qmeas::survival::{nonideal_probability, q_factor, SurvivalDistribution};
use qmeas::{ComplexMatrix, DensityMatrix, Hamiltonian};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::fixture::{self, MeasureFixture, ScatteringFixture};
use crate::report::{Report, Table, Value};

const PROBABILITY_TOL: f64 = 1e-12;

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (inner + 0.5 * (values[0] + values[n - 1]))
}

fn eps0_warning(report: &mut Report, eps0: f64) {
    if eps0 > EPS0_WARNING {
        report.warnings.push(format!(
            "eps0 = {eps0} exceeds {EPS0_WARNING}; first-order survival results are outside their validity range"
        ));
    }
}

pub fn measure(cfg: &RunConfig, fixture_path: Option<&Path>) -> Result<Report> {
    let path = fixture_path
        .or(cfg.measure.fixture.as_deref())
        .ok_or_else(|| CliError::Config("measure needs a fixture (--fixture or measure.fixture)".into()))?;
    let fx: MeasureFixture = fixture::load(path)?;
    let a = fixture::matrix(&fx.observable, "observable")?;
    let obs = SpectralObservable::from_hermitian(&a, cfg.measure.cluster_tol)?;
    let rho = match (&fx.state, &fx.density) {
        (Some(psi), None) => DensityMatrix::pure(&fixture::vector(psi))?,
        (None, Some(m)) => DensityMatrix::new(fixture::matrix(m, "density")?)?,
        _ => return Err(CliError::Config("fixture needs exactly one of state or density".into())),
    };
    let n = obs.dim();
    let h = match &fx.hamiltonian {
        Some(m) => Hamiltonian::new(fixture::matrix(m, "hamiltonian")?)?,
        None => Hamiltonian::new(ComplexMatrix::zeros(n))?,
    };
    let hbar = cfg.constants.hbar;
    let dist = cfg.distribution()?;

    let ideal = measurement_probabilities(&rho, &obs)?;
    let nonideal = nonideal_probability(&rho, &h, &dist, &obs, hbar)?;
    let mut report = Report::new("measure");
    let mut outcomes = Table::new("outcomes", &["alpha", "eigenvalue", "degeneracy", "p_ideal", "p_nonideal"]);
    let degs = obs.degeneracies();
    for alpha in 0..obs.num_outcomes() {
        outcomes.push(vec![
            alpha.into(),
            obs.eigenvalues()[alpha].into(),
            degs[alpha].into(),
            ideal[alpha].into(),
            nonideal[alpha].into(),
        ]);
    }
    report.tables.push(outcomes);

    let u_q = h.propagator(cfg.measure.wait, hbar);
    let rot = DegenerateRotation::identity(&obs);
    let mut post = Table::new("post_states", &["alpha", "row", "col", "re", "im"]);
    let mut trace_dev: f64 = 0.0;
    for alpha in 0..obs.num_outcomes() {
        if ideal[alpha] <= obs.tolerance() {
            continue;
        }
        let (_, state) = post_measurement_state(&rho, &obs, &rot, alpha, &u_q)?;
        let m = state.matrix();
        trace_dev = trace_dev.max((m.trace().re - 1.0).abs());
        for i in 0..n {
            for j in 0..n {
                post.push(vec![alpha.into(), i.into(), j.into(), m[(i, j)].re.into(), m[(i, j)].im.into()]);
            }
        }
    }
    report.tables.push(post);
    report.check("sum_p_ideal", qmeas::sum::pairwise(&ideal) - 1.0, PROBABILITY_TOL);
    report.check("sum_p_nonideal", qmeas::sum::pairwise(&nonideal) - 1.0, PROBABILITY_TOL);
    report.check("post_state_trace", trace_dev, PROBABILITY_TOL);
    Ok(report)
}

pub fn fig1(cfg: &RunConfig) -> Result<Report> {
    let f = &cfg.fig1;
    let mut columns = vec!["xi".to_string()];
    columns.extend(f.eps0.iter().map(|e| format!("W_eps0={e}")));
    let mut table = Table::with_columns("fig1", columns);
    let curves: Vec<Vec<(f64, f64)>> = f.eps0.iter().map(|&e| w_curve(e, f.xi_min, f.xi_max, f.xi_step)).collect();
    let xi: Vec<f64> = w_curve(0.0, f.xi_min, f.xi_max, f.xi_step).into_iter().map(|(x, _)| x).collect();
    for (k, &x) in xi.iter().enumerate() {
        let mut row: Vec<Value> = vec![x.into()];
        row.extend(curves.iter().map(|c| Value::Num(c[k].1)));
        table.push(row);
    }
    let mut report = Report::new("fig1");
    if f.xi_min <= -3.0 && f.xi_max >= 3.0 {
        for (e, c) in f.eps0.iter().zip(&curves) {
            let values: Vec<f64> = c.iter().map(|(_, w)| *w).collect();
            report.check(&format!("integral_W_eps0={e}"), trapezoid(&values, f.xi_step) - 1.0, 1e-4);
        }
    }
    for &e in &f.eps0 {
        eps0_warning(&mut report, e);
    }
    report.tables.push(table);
    Ok(report)
}

fn momentum_grid(cfg: &RunConfig, pk: &GaussianPacket) -> Result<CellGrid> {
    let b = pk.b();
    let eps = cfg.grid.epsilon.unwrap_or(b / 10.0);
    let grid = match cfg.grid.n {
        Some(n) => CellGrid::new(CellKind::Momentum, eps, 1, n)?,
        None => CellGrid::covering(CellKind::Momentum, eps, 1, pk.p0().abs() + cfg.grid.coverage * b)?,
    };
    Ok(grid)
}

pub fn survival(cfg: &RunConfig) -> Result<Report> {
    let c = &cfg.constants;
    let pk = GaussianPacket::new(cfg.packet.a, cfg.packet.p0, c.hbar, c.m)?;
    let dist = cfg.distribution()?;
    let mut report = Report::new("survival");
    let eps0 = pk.eps0(&dist);
    eps0_warning(&mut report, eps0);

    let u = uncertainty_product(&pk, &dist, true)?;
    let q = u.q.unwrap_or(1.0);
    let x0 = pk.x0(&dist);
    let l = pk.l(&dist);
    let keep = |x: f64| match x0 {
        Some(r) if l > 0.0 => x >= r,
        Some(r) => x <= r,
        None => true,
    };

    let exact = if cfg.position.exact { Some(ExactPositionDensity::new(&pk, &dist, &momentum_grid(cfg, &pk)?)?) } else { None };
    let a = pk.a();
    let h = cfg.position.step * a;
    let half = (cfg.position.half_width / cfg.position.step).round() as i64;
    let mut cols = vec!["x", "xi", "p_ideal", "p_first_order", "p_renormalized"];
    if exact.is_some() {
        cols.push("p_exact");
    }
    let mut pos = Table::new("position", &cols);
    let mut gap: f64 = 0.0;
    for k in -half..=half {
        let x = h * k as f64;
        let raw = survival_position_gaussian(&pk, &dist, x);
        let renorm = if keep(x) && raw > 0.0 { raw / q } else { 0.0 };
        let mut row: Vec<Value> =
            vec![x.into(), (x / a).into(), packet_position_density_ideal(&pk, x).into(), raw.into(), renorm.into()];
        if let Some(e) = &exact {
            let v = e.eval(x);
            gap = gap.max((v - raw).abs());
            row.push(v.into());
        }
        pos.push(row);
    }

    let b = pk.b();
    let dp_step = b / 20.0;
    let mut mom = Table::new("momentum", &["p", "p_momentum_ideal", "p_momentum_survival"]);
    for k in -120..=120 {
        let p = pk.p0() + dp_step * k as f64;
        let ideal = packet_momentum_density(&pk, p);
        // The diagonal in momentum carries q(0) = 1.
        let averaged = ideal * q_factor(&dist, 0.0).re;
        mom.push(vec![p.into(), ideal.into(), averaged.into()]);
    }

    let closed = 0.5 * c.hbar * (1.0 - eps0).sqrt();
    let mut summary = Table::new("summary", &["quantity", "value"]);
    let mut put = |k: &str, v: f64| summary.push(vec![k.into(), v.into()]);
    put("tau", dist.tau());
    put("s", dist.shape());
    put("l", l);
    put("eps0", eps0);
    put("x0", x0.unwrap_or(f64::NEG_INFINITY));
    put("Q", q);
    put("mean_x", u.mean_x);
    put("dx", u.dx);
    put("dp", u.dp);
    put("product", u.product);
    put("product_closed_form", closed);
    put("product_relative_error", (u.product - closed).abs() / closed);
    if exact.is_some() {
        put("exact_first_order_gap", gap);
    }

    for (name, t) in [("p_first_order", &pos), ("p_ideal", &pos)] {
        let v = t.column(name).unwrap_or_default();
        report.check(&format!("integral_{name}"), trapezoid(&v, h) - 1.0, 1e-10);
    }
    let v = pos.column("p_renormalized").unwrap_or_default();
    report.check("integral_p_renormalized", trapezoid(&v, h) - 1.0, 1e-3);
    if exact.is_some() {
        let v = pos.column("p_exact").unwrap_or_default();
        report.check("integral_p_exact", trapezoid(&v, h) - 1.0, 1e-6);
    }
    for name in ["p_momentum_ideal", "p_momentum_survival"] {
        let v = mom.column(name).unwrap_or_default();
        report.check(&format!("integral_{name}"), trapezoid(&v, dp_step) - 1.0, 1e-10);
    }
    report.tables.push(summary);
    report.tables.push(pos);
    report.tables.push(mom);
    Ok(report)
}

pub fn asymptotics(cfg: &RunConfig, sigmas: Option<&[f64]>) -> Result<Report> {
    let sigmas = sigmas.unwrap_or(&cfg.asymptotics.sigma);
    let c = &cfg.constants;
    let p0 = if cfg.packet.p0 == 0.0 { 1.0 } else { cfg.packet.p0 };
    let pk = GaussianPacket::new(cfg.packet.a, p0, c.hbar, c.m)?;
    let a = pk.a();
    let s = cfg.survival.s;
    let mut moments = Table::new("moments", &["sigma", "n", "exact", "asymptotic", "relative_error", "quadrature"]);
    let mut qt =
        Table::new("renormalization", &["sigma", "q_exact", "q_minus_1_exact", "q_minus_1_asymptotic", "relative_error"]);
    let mut report = Report::new("asymptotics");
    for &sigma in sigmas {
        if !(sigma > 1.0) {
            return Err(CliError::Config(format!("sigma must exceed 1, got {sigma}")));
        }
        let l = a / (2.0 * sigma.sqrt());
        let tau = l * c.m / (s * p0.abs());
        let dist = SurvivalDistribution::gamma(tau, s)?;
        let x0 = pk.x0(&dist).ok_or(CliError::Config("l must be nonzero".into()))?;
        for n in 0..=2u32 {
            let pair = appendix_d_moments(&pk, &dist, n)?;
            let f = |x: f64| x.powi(n as i32) * survival_position_gaussian(&pk, &dist, x);
            let mut quad = Adaptive::new(15, 0.0, 1e-13);
            quad.abs_tol = 1e-14 * pair.asymptotic.abs();
            let direct = if p0 > 0.0 { quad.integrate(x0 - 12.0 * a, x0, f)? } else { quad.integrate(x0, x0 + 12.0 * a, f)? };
            moments.push(vec![
                sigma.into(),
                (n as usize).into(),
                pair.exact.into(),
                pair.asymptotic.into(),
                pair.relative_error().into(),
                direct.into(),
            ]);
            report.check(&format!("moment_n{n}_sigma{sigma}"), pair.exact - direct, 1e-11);
        }
        let excess = renormalization_excess(&pk, &dist)?;
        let q = renormalization_constant(&pk, &dist)?;
        qt.push(vec![
            sigma.into(),
            q.exact.into(),
            excess.exact.into(),
            excess.asymptotic.into(),
            excess.relative_error().into(),
        ]);
    }
    report.tables.push(moments);
    report.tables.push(qt);
    Ok(report)
}

pub fn scattering_demo(cfg: &RunConfig, model_path: Option<&Path>, nus: Option<&[f64]>) -> Result<Report> {
    let path = model_path
        .or(cfg.scattering.model.as_deref())
        .ok_or_else(|| CliError::Config("scattering-demo needs a model (--model or scattering.model)".into()))?;
    let fx: ScatteringFixture = fixture::load(path)?;
    let h0 = fixture::matrix(&fx.h0, "h0")?;
    let hi = fixture::matrix(&fx.hi, "hi")?;
    let hbar = cfg.constants.hbar;
    let base = ScatteringModel::new(h0, hi, 0.0, hbar)?;
    let scale = base.full().spread().max(base.free().spread()) / hbar;
    let nus: Vec<f64> = match nus.or(cfg.scattering.nu.as_deref()) {
        Some(v) => v.to_vec(),
        None => [1e-2, 1e-3, 1e-4].iter().map(|f| f * scale.max(1.0)).collect(),
    };
    let mut report = Report::new("scattering-demo");
    let mut defects = Table::new(
        "defects",
        &["nu", "unitarity_defect", "isometry_defect_plus", "isometry_defect_minus", "bound_states", "range_defect"],
    );
    let mut norms = Table::new("normalization", &["nu", "lambda", "energy", "n_lambda", "norm_sum", "time_spread"]);
    let mut ls = Table::new("lippmann_schwinger", &["nu", "lambda", "status", "iterations", "difference"]);
    let mut spread_max: f64 = 0.0;
    let mut n_dev: f64 = 0.0;
    for &nu in &nus {
        let model = base.with_nu(nu);
        let w = wave_operators_and_s_matrix(&model)?;
        defects.push(vec![
            nu.into(),
            w.unitarity_defect.into(),
            w.isometry_defect_plus.into(),
            w.isometry_defect_minus.into(),
            w.bound_states.into(),
            w.range_defect.into(),
        ]);
        for lambda in 0..model.dim() {
            let sums: Vec<f64> = cfg
                .scattering
                .times
                .iter()
                .map(|&t| transition_amplitudes(&model, lambda, t).map(|tr| tr.norm_sum))
                .collect::<qmeas::Result<_>>()?;
            let t0 = transition_amplitudes(&model, lambda, 0.0)?;
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let spread = if sums.is_empty() { 0.0 } else { hi - lo };
            spread_max = spread_max.max(spread);
            n_dev = n_dev.max((t0.n_lambda - t0.norm_sum).abs());
            norms.push(vec![
                nu.into(),
                lambda.into(),
                model.energies()[lambda].into(),
                t0.n_lambda.into(),
                t0.norm_sum.into(),
                spread.into(),
            ]);
            let row = match lippmann_schwinger_iterate(&model, lambda, 200, 1e-13) {
                Ok(sol) => {
                    let direct = scattered_state(&model, lambda)?;
                    let diff = qmeas::linalg::max_abs_diff_vec(&sol.state, &direct);
                    vec![nu.into(), lambda.into(), "converged".into(), sol.iterations.into(), diff.into()]
                }
                Err(qmeas::Error::Divergence { iteration, .. }) => {
                    vec![nu.into(), lambda.into(), "diverged".into(), iteration.into(), f64::NAN.into()]
                }
                Err(qmeas::Error::NoConvergence { .. }) => {
                    vec![nu.into(), lambda.into(), "unconverged".into(), 200usize.into(), f64::NAN.into()]
                }
                Err(e) => return Err(e.into()),
            };
            ls.push(row);
        }
    }
    report.check("norm_sum_time_spread", spread_max, 1e-10);
    report.check("n_lambda_vs_norm_sum", n_dev, 1e-10);

    let p = &cfg.scattering.probe;
    let family = BandFamily { levels: p.levels, spacing: p.spacing, coupling: p.coupling, hbar };
    let mut probe = Table::new("probe", &["epsilon", "nu", "ratio", "kappa", "n_lambda", "deviation"]);
    for row in double_limit_probe(&family, &p.epsilons, &p.nus)? {
        probe.push(vec![
            row.epsilon.into(),
            row.nu.into(),
            row.ratio.into(),
            family.kappa(row.epsilon, row.nu).into(),
            row.n_lambda.into(),
            row.deviation.into(),
        ]);
    }
    report.tables.push(defects);
    report.tables.push(norms);
    report.tables.push(ls);
    report.tables.push(probe);
    Ok(report)
}
