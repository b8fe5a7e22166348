//! Command dispatch.

use clap::Subcommand;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use szego_core::limit::polar_grid;
use szego_core::linalg::{det, hermitian_eigen, identity, op_norm};
use szego_core::measure::bound_state_sums;
use szego_core::{
    asymptotics_report, build_pipeline, check_sum_rule, spectral_factorize, stieltjes, z_quantity,
    FactorConfig, MatrixMeasure, NormType, Tolerances,
};

use crate::output::{matrix_cells, matrix_header, ComplexRecord, MatrixRecord, Report, Table};
use crate::spec::MeasureSpec;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Validate a measure and report its invariants and bound states.
    CheckMeasure {
        /// Measure document (JSON).
        #[serde(skip)]
        spec: PathBuf,
    },
    /// Block Jacobi parameters up to degree N.
    Recurrence {
        #[serde(skip)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        /// Normalization: 1 (each A_n positive), 2 (each A_1 ... A_n positive) or 3 (A_n lower triangular).
        #[arg(long = "type", default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        norm_type: u8,
    },
    /// Outer factor G with G* G = w on the circle.
    Factorize {
        #[serde(skip)]
        spec: PathBuf,
        /// Number of Taylor coefficients kept (default: quad_order / 8).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Blaschke-Potapov factors for the bound states, with kernel angles.
    Blaschke {
        #[serde(skip)]
        spec: PathBuf,
    },
    /// The limit function on a polar grid of radius r.
    Limit {
        #[serde(skip)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        radius: f64,
    },
    /// Pointwise, L2, mass and H_n checks for each n.
    Verify {
        #[serde(skip)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 0.8)]
        radius: f64,
    },
    /// Sum-rule ledger for partial sums up to N.
    Sumrule {
        #[serde(skip)]
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

impl Command {
    /// Base name of the output files.
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckMeasure { .. } => "check-measure",
            Command::Recurrence { .. } => "recurrence",
            Command::Factorize { .. } => "factorize",
            Command::Blaschke { .. } => "blaschke",
            Command::Limit { .. } => "limit",
            Command::Verify { .. } => "verify",
            Command::Sumrule { .. } => "sumrule",
        }
    }

    pub fn spec_path(&self) -> &PathBuf {
        match self {
            Command::CheckMeasure { spec }
            | Command::Recurrence { spec, .. }
            | Command::Factorize { spec, .. }
            | Command::Blaschke { spec }
            | Command::Limit { spec, .. }
            | Command::Verify { spec, .. }
            | Command::Sumrule { spec, .. } => spec,
        }
    }
}

fn to_value(v: impl Serialize) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

fn check_radius(r: f64) -> Result<(), CliError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CliError::Validation(format!(
            "radius {r} must lie in (0, 1)"
        )));
    }
    Ok(())
}

pub fn execute(cmd: &Command, spec: &MeasureSpec, tol: &Tolerances) -> Result<Report, CliError> {
    let mu = spec.to_measure(tol)?;
    match cmd {
        Command::CheckMeasure { .. } => check_measure(&mu),
        Command::Recurrence { n, norm_type, .. } => recurrence(&mu, *n, *norm_type),
        Command::Factorize { order, .. } => factorize(&mu, *order),
        Command::Blaschke { .. } => blaschke(&mu),
        Command::Limit { radius, .. } => limit(&mu, *radius),
        Command::Verify { n_list, radius, .. } => verify(&mu, n_list, *radius),
        Command::Sumrule { n, .. } => sumrule(&mu, *n),
    }
}

fn states_table(mu: &MatrixMeasure) -> (Table, Vec<serde_json::Value>) {
    let mut t = Table::new(
        "bound_states",
        ["k", "energy", "z_re", "z_im", "multiplicity"]
            .map(String::from)
            .to_vec(),
    );
    let mut records = Vec::new();
    for (k, s) in mu.bound_states().iter().enumerate() {
        t.push(vec![
            (k + 1) as f64,
            s.energy,
            s.z.re,
            s.z.im,
            s.multiplicity as f64,
        ]);
        records.push(json!({
            "energy": s.energy,
            "z": ComplexRecord::from(s.z),
            "multiplicity": s.multiplicity,
            "weight": MatrixRecord::from(&s.weight),
        }));
    }
    (t, records)
}

fn check_measure(mu: &MatrixMeasure) -> Result<Report, CliError> {
    let l = mu.dim();
    let mass_defect = op_norm(&(mu.total_mass() - identity(l)));
    let w = mu.szego_weight()?;
    let (min_det, node) = (0..w.node_count())
        .map(|m| (det(&w.value(m)).re, m))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let min_eig = (0..w.node_count())
        .map(|m| hermitian_eigen(&w.value(m)).0[0])
        .fold(f64::INFINITY, f64::min);
    let states = mu.bound_states();
    let (blaschke_sum, lieb_sum) = bound_state_sums(&states);
    let (blaschke_sum, lieb_sum) = (blaschke_sum + 0.0, lieb_sum + 0.0);
    let (table, records) = states_table(mu);
    let szego = min_det > 0.0 && min_det.ln().is_finite();

    let mut summary = vec![
        format!(
            "dimension {l}, {} quadrature nodes, {} point masses",
            mu.quad_order(),
            mu.masses().len()
        ),
        format!("total mass defect {mass_defect:.3e}"),
        format!("weight: min eigenvalue {min_eig:.3e}, min det {min_det:.3e} at node {node}"),
        format!("bound-state sums: {blaschke_sum:.6} (Blaschke), {lieb_sum:.6} ((|E|-2)^1/2)"),
    ];
    for s in &states {
        summary.push(format!(
            "  E = {:.6}  z = {:.6}  multiplicity {}",
            s.energy, s.z.re, s.multiplicity
        ));
    }
    let z = if szego { Some(z_quantity(mu)?) } else { None };
    let record = json!({
        "dim": l,
        "quad_order": mu.quad_order(),
        "congruence": MatrixRecord::from(mu.congruence()),
        "total_mass_defect": mass_defect,
        "weight_min_eigenvalue": min_eig,
        "weight_min_det": min_det,
        "szego_integrable": szego,
        "z": z,
        "bound_states": records,
        "blaschke_sum": blaschke_sum,
        "lieb_thirring_sum": lieb_sum,
    });
    if !szego {
        return Err(CliError::Validation(format!(
            "Szegő condition: log det w is -inf at node {node} (det {min_det:.3e})"
        )));
    }
    summary.push(format!(
        "Szegő integral Z = {:.12}",
        z.map_or(f64::NAN, |z| z.value)
    ));
    Ok(Report {
        summary,
        record,
        tables: vec![table],
    })
}

fn recurrence(mu: &MatrixMeasure, n: usize, norm_type: u8) -> Result<Report, CliError> {
    if n == 0 {
        return Err(CliError::Validation("n must be at least 1".into()));
    }
    let seq = stieltjes(mu, n)?;
    let target = match norm_type {
        1 => NormType::Type1,
        2 => NormType::Type2,
        _ => NormType::Type3,
    };
    let (j, t) = seq.jacobi().to_type(target);
    let l = mu.dim();
    let mut header = vec!["n".to_string()];
    header.extend(matrix_header("A", l));
    header.extend(matrix_header("B", l));
    let mut table = Table::new("jacobi", header);
    for k in 1..=n {
        let mut row = vec![k as f64];
        row.extend(matrix_cells(j.a(k)));
        row.extend(matrix_cells(j.b(k)));
        table.push(row);
    }
    let orth = seq.orthonormality_defect();
    let resid = seq.recurrence_residual();
    let summary = vec![
        format!("{n} blocks of size {l}, {target:?}"),
        format!("orthonormality defect {orth:.3e}, recurrence residual {resid:.3e}"),
        format!("sigma unitarity defect {:.3e}", t.max_unitarity_defect()),
        match seq.drift_warning {
            Some(d) => format!("warning: orthonormality drift from degree {d}"),
            None => "no orthonormality drift".into(),
        },
    ];
    let record = json!({
        "norm_type": target,
        "depth": n,
        "orthonormality_defect": orth,
        "recurrence_residual": resid,
        "drift_warning": seq.drift_warning,
        "a": j.a_blocks().iter().map(MatrixRecord::from).collect::<Vec<_>>(),
        "b": j.b_blocks().iter().map(MatrixRecord::from).collect::<Vec<_>>(),
    });
    Ok(Report {
        summary,
        record,
        tables: vec![table],
    })
}

fn factorize(mu: &MatrixMeasure, order: Option<usize>) -> Result<Report, CliError> {
    let w = mu.szego_weight()?;
    let cfg = FactorConfig {
        order,
        ..Default::default()
    };
    let g = spectral_factorize(&w, &cfg, mu.tolerances())?;
    let l = mu.dim();
    let mut header = vec!["k".to_string()];
    header.extend(matrix_header("G", l));
    let mut table = Table::new("coefficients", header);
    for (k, c) in g.coeffs().iter().enumerate() {
        let mut row = vec![k as f64];
        row.extend(matrix_cells(c));
        table.push(row);
    }
    let residual = g.residual(&w);
    let leakage = g.negative_leakage();
    let det_check = g.det_szego_check();
    let summary = vec![
        format!(
            "order {}, {} Newton sweeps, {} edge deflations",
            g.order(),
            g.sweeps,
            g.deflations
        ),
        format!("max ||G*G - w|| {residual:.3e}"),
        format!("negative-frequency leakage {leakage:.3e}, det-Szegő residual {det_check:.3e}"),
    ];
    let record = json!({
        "order": g.order(),
        "sweeps": g.sweeps,
        "deflations": g.deflations,
        "residual": residual,
        "negative_leakage": leakage,
        "det_szego_residual": det_check,
        "g0": MatrixRecord::from(g.g0()),
    });
    Ok(Report {
        summary,
        record,
        tables: vec![table],
    })
}

fn blaschke(mu: &MatrixMeasure) -> Result<Report, CliError> {
    let p = build_pipeline(mu, &FactorConfig::default())?;
    let b = &p.limit.b;
    let unitarity = b.boundary_unitarity_defect(1024)?;
    let mut table = Table::new(
        "factors",
        ["k", "z_re", "z_im", "rank", "kernel_angle"]
            .map(String::from)
            .to_vec(),
    );
    let mut factors = Vec::new();
    for (k, (f, angle)) in b.factors().iter().zip(&p.kernel_angles).enumerate() {
        table.push(vec![(k + 1) as f64, f.z.re, f.z.im, f.s as f64, *angle]);
        factors.push(json!({ "z": ComplexRecord::from(f.z), "rank": f.s, "u": MatrixRecord::from(&f.u), "kernel_angle": angle }));
    }
    let max_angle = p.kernel_angles.iter().cloned().fold(0.0, f64::max);
    let summary = vec![
        format!(
            "{} elementary factors, det B(0) = {:.6e}",
            b.factors().len(),
            b.det_at_zero()
        ),
        format!("boundary unitarity defect {unitarity:.3e}, max kernel angle {max_angle:.3e}"),
    ];
    let record = json!({
        "factors": factors,
        "det_at_zero": b.det_at_zero(),
        "boundary_unitarity_defect": unitarity,
    });
    Ok(Report {
        summary,
        record,
        tables: vec![table],
    })
}

fn limit(mu: &MatrixMeasure, radius: f64) -> Result<Report, CliError> {
    check_radius(radius)?;
    let p = build_pipeline(mu, &FactorConfig::default())?;
    let l = mu.dim();
    let mut header = vec!["z_re".to_string(), "z_im".to_string()];
    header.extend(matrix_header("L", l));
    let mut table = Table::new("grid", header);
    for z in polar_grid(radius) {
        let mut row = vec![z.re, z.im];
        row.extend(matrix_cells(&p.limit.eval(z)?));
        table.push(row);
    }
    let l0 = p.limit.at_zero();
    let eig = hermitian_eigen(&l0).0;
    let summary = vec![
        format!("L on {} points with |z| <= {radius}", table.rows.len()),
        format!("L(0) eigenvalues {eig:?}"),
        format!("factorization residual {:.3e}", p.factor_residual),
    ];
    let record = json!({
        "radius": radius,
        "l0": MatrixRecord::from(&l0),
        "v": MatrixRecord::from(&p.limit.v),
        "g0": MatrixRecord::from(p.limit.g.g0()),
        "factor_residual": p.factor_residual,
    });
    Ok(Report {
        summary,
        record,
        tables: vec![table],
    })
}

fn verify(mu: &MatrixMeasure, n_list: &[usize], radius: f64) -> Result<Report, CliError> {
    check_radius(radius)?;
    let n_max = n_list
        .iter()
        .copied()
        .max()
        .ok_or_else(|| CliError::Validation("n-list is empty".into()))?;
    let p = build_pipeline(mu, &FactorConfig::default())?;
    let seq = stieltjes(mu, n_max)?;
    let rep = asymptotics_report(&p, &seq, n_list, radius)?;
    let header = [
        "n",
        "sup_error",
        "kappa_error",
        "l2_residual",
        "mass_norm",
        "mass_root_norm",
        "h_eig_min",
        "h_eig_max",
        "h_log_det",
        "h_unitary_defect",
    ];
    let mut table = Table::new("report", header.map(String::from).to_vec());
    let mut summary = vec![format!("radius {radius}")];
    for (i, &n) in rep.n_values.iter().enumerate() {
        let (pw, m, h) = (&rep.pointwise[i], &rep.masses[i], &rep.h[i]);
        let eig_min = h.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let eig_max = h
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        table.push(vec![
            n as f64,
            pw.sup_error,
            pw.kappa_error,
            rep.l2_residuals[i],
            m.value,
            m.max_root_norm,
            eig_min,
            eig_max,
            h.log_det,
            h.unitary_defect,
        ]);
        summary.push(format!(
            "n = {n:4}: sup {:.3e}  L2 {:.3e}  mass {:.3e}  |log det H| {:.3e}  defect {:.3e}",
            pw.sup_error,
            rep.l2_residuals[i],
            m.value,
            h.log_det.abs(),
            h.unitary_defect
        ));
    }
    Ok(Report {
        summary,
        record: to_value(&rep),
        tables: vec![table],
    })
}

fn sumrule(mu: &MatrixMeasure, n: usize) -> Result<Report, CliError> {
    if n == 0 {
        return Err(CliError::Validation("n must be at least 1".into()));
    }
    let p = build_pipeline(mu, &FactorConfig::default())?;
    let seq = stieltjes(mu, n)?;
    let n_list: Vec<usize> = (1..=n).collect();
    let ledger = check_sum_rule(mu, seq.jacobi(), &p.states, Some(&p.limit.g), &n_list)?;
    let mut table = Table::new(
        "ledger",
        ["n", "a0_partial", "residual", "bridge"]
            .map(String::from)
            .to_vec(),
    );
    for (i, &k) in ledger.n_values.iter().enumerate() {
        table.push(vec![
            k as f64,
            ledger.a0_partial[i],
            ledger.residuals[i],
            ledger.bridge.get(i).copied().unwrap_or(f64::NAN),
        ]);
    }
    let last = n - 1;
    let summary = vec![
        format!(
            "Z = {:.12} (extrapolation error {:.2e})",
            ledger.z.value + 0.0,
            ledger.z.error
        ),
        format!(
            "E0 = {:.12}, A0({n}) = {:.12}",
            ledger.e0, ledger.a0_partial[last]
        ),
        format!(
            "residual |Z - E0 - A0({n})| = {:.3e}",
            ledger.residuals[last]
        ),
        format!(
            "route gap {:.3e} (allowance {:.3e}): {}",
            ledger.route_gap.unwrap_or(f64::NAN),
            ledger.route_allowance.unwrap_or(f64::NAN),
            if ledger.routes_agree() {
                "routes agree"
            } else {
                "routes DISAGREE"
            }
        ),
        if ledger.oscillating {
            "warning: partial sums oscillate".into()
        } else {
            "partial sums settle".into()
        },
    ];
    Ok(Report {
        summary,
        record: to_value(&ledger),
        tables: vec![table],
    })
}
