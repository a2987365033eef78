//! Subcommand bodies. Each returns a one-line summary on success; a failed
//! check becomes an assertion error after its report has been written.

use core::f64::consts::PI;

use mpgabor_core::gabor::{gabor_matrix_visit, generalized_metaplectic, tracking_lattice, OperatorHandle};
use mpgabor_core::phase::{Axis, ConeSpec, PhaseGrid};
use mpgabor_core::signal::gaussian_window;
use mpgabor_core::symplectic::{euler_decompose, free_particle_flow, free_particle_sigma, random_symplectic};
use mpgabor_core::tf::stft_visit;
use mpgabor_core::verify::boxstretch::{box_grid, box_stretch_demo};
use mpgabor_core::verify::cone::{cone_propagation_check, ConeSweep};
use mpgabor_core::verify::dispersion::{check_span, dispersion_sup, fit_slope};
use mpgabor_core::verify::envelope::{
    algebraic_window_report, envelope_grid, envelope_report, free_particle_family, random_family, EnvelopeConfig,
    FamilyReport,
};
use mpgabor_core::verify::lemmas::{
    assemble, line_check, line_tuples, planar_convolution_check, planar_tuples, LemmaKind, LemmaSweep, LineGrid,
    PlanarGrid,
};
use mpgabor_core::verify::norms::{default_battery, norm_growth_check};
use mpgabor_core::{Complex64, DiscreteSignal, GridSpec, Matrix, SymplecticMatrix};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Family, OperatorSpec, RunConfig, SignalSpec};
use crate::error::CliError;
use crate::output::{columns, matrix_json, num, OutputDir};

/// Which verification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    Envelope,
    Dispersion,
    Lemmas,
    Cone,
    Norms,
    #[value(name = "box")]
    Box,
}

pub fn symplectic(spec: &OperatorSpec, d: usize) -> Result<SymplecticMatrix, CliError> {
    Ok(match spec {
        OperatorSpec::Identity => SymplecticMatrix::identity(d),
        OperatorSpec::FreeParticle { t } => free_particle_flow(*t, d),
        OperatorSpec::Matrix { rows } => {
            if rows.len() != 2 * d {
                return Err(CliError::validation(format!("matrix must be {0}×{0} for d = {d}", 2 * d)));
            }
            SymplecticMatrix::new(Matrix::from_rows(rows)?)?
        }
        OperatorSpec::Random { seed, sigma_max } => random_symplectic(*seed, d, *sigma_max)?,
        OperatorSpec::Generalized { inner, .. } => symplectic(inner, d)?,
    })
}

pub fn operator(spec: &OperatorSpec, d: usize) -> Result<OperatorHandle, CliError> {
    Ok(match spec {
        OperatorSpec::Identity => OperatorHandle::Identity,
        OperatorSpec::Generalized { symbol, inner } => generalized_metaplectic(symbol.clone(), symplectic(inner, d)?)?,
        other => OperatorHandle::metaplectic(symplectic(other, d)?)?,
    })
}

pub fn signal(spec: &SignalSpec, grid: GridSpec) -> Result<DiscreteSignal, CliError> {
    let g = gaussian_window(grid);
    Ok(match spec {
        SignalSpec::Gaussian => g,
        SignalSpec::Hermite { k } => {
            let k = *k;
            g.map(|y, v| {
                let u = (2.0 * PI).sqrt() * y[0];
                let (mut a, mut b) = (1.0, 2.0 * u);
                if k == 0 {
                    return v;
                }
                for j in 1..k {
                    (a, b) = (b, 2.0 * u * b - 2.0 * j as f64 * a);
                }
                v * b
            })
        }
        SignalSpec::Packet { x, xi } => g.tf_shift(x, xi, true)?,
    })
}

/// Signal-level grid: explicit `n`/`L`, else the default for `d`.
pub fn grid(cfg: &RunConfig) -> Result<GridSpec, CliError> {
    let (n, l) = RunConfig::default_grid(cfg.d);
    Ok(GridSpec::new(cfg.d, cfg.n.unwrap_or(n), cfg.half_width.unwrap_or(l))?)
}

fn default_sources(d: usize) -> Vec<f64> {
    EnvelopeConfig::default_for(d).sources
}

fn require_d1(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.d != 1 {
        return Err(CliError::validation(format!("{what} is available for d = 1 only")));
    }
    Ok(())
}

fn check(passed: bool, summary: String) -> Result<String, CliError> {
    if passed { Ok(summary) } else { Err(CliError::assertion(summary)) }
}

/// Fills every field a command leaves to its defaults.
pub fn resolve(cfg: &mut RunConfig, command: &str) -> Result<(), CliError> {
    cfg.validate()?;
    if cfg.phase_grid.sources.is_empty() {
        cfg.phase_grid.sources = default_sources(cfg.d);
    }
    if cfg.phase_grid.sources.len() % (2 * cfg.d) != 0 {
        return Err(CliError::validation("phase_grid.sources must hold 2d coordinates per point"));
    }
    if command == "gabor" && (cfg.n.is_none() || cfg.half_width.is_none()) {
        let s = symplectic(&cfg.operator, cfg.d)?;
        let lattice_half = cfg.phase_grid.step * cfg.phase_grid.half_count as f64;
        let ecfg = EnvelopeConfig {
            d: cfg.d,
            n_order: cfg.n_order,
            sources: cfg.phase_grid.sources.clone(),
            step: cfg.phase_grid.step,
            reach: lattice_half / (1.0 + s.matrix().spectral_norm().powi(2)).sqrt(),
            margin: 0.0,
        };
        let (g, _) = envelope_grid(&s, &ecfg, cfg.d)?;
        cfg.n.get_or_insert(g.n);
        cfg.half_width.get_or_insert(g.half_width);
    }
    let (n, l) = RunConfig::default_grid(cfg.d);
    cfg.n.get_or_insert(n);
    cfg.half_width.get_or_insert(l);
    Ok(())
}

pub fn decompose(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    let s = symplectic(&cfg.operator, cfg.d)?;
    let dec = euler_decompose(&s)?;
    let recon = dec.reconstruction_residual(&s);
    let rot = dec.rotation_residual();
    out.json(
        "decompose.json",
        json!({
            "s": matrix_json(s.matrix()),
            "u": matrix_json(dec.u()),
            "v": matrix_json(dec.v()),
            "sigma": dec.sigma(),
            "det_sigma": dec.det_sigma(),
            "reconstruction_residual": recon,
            "rotation_residual": rot,
            "tol": cfg.tol,
        }),
    )?;
    let summary = format!("sigma = {:?}, residuals {recon:e} / {rot:e}", dec.sigma());
    if recon <= cfg.tol && rot <= cfg.tol {
        Ok(summary)
    } else {
        Err(CliError::computation(format!("residual above tolerance {}: {summary}", cfg.tol)))
    }
}

fn signal_rows(f: &DiscreteSignal) -> (Vec<String>, Vec<Vec<String>>) {
    let grid = *f.grid();
    let mut header = columns("y", grid.d);
    header.extend(["re", "im", "abs"].map(String::from));
    let mut y = vec![0.0; grid.d];
    let rows = f
        .samples()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            grid.point(i, &mut y);
            let mut r: Vec<String> = y.iter().map(|c| num(*c)).collect();
            r.extend([num(v.re), num(v.im), num(v.norm())]);
            r
        })
        .collect();
    (header, rows)
}

pub fn apply(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    let grid = grid(cfg)?;
    let op = operator(&cfg.operator, cfg.d)?;
    let f = signal(&cfg.input, grid)?;
    let image = op.apply(&f)?;
    let (header, rows) = signal_rows(&image);
    out.csv("apply.csv", &header, &rows)?;
    out.json(
        "apply.json",
        json!({
            "operator": op.describe(),
            "grid": grid,
            "input_norm": f.norm(),
            "output_norm": image.norm(),
            "rows": rows.len(),
        }),
    )?;
    Ok(format!("{} samples, ‖f‖ = {}, ‖Af‖ = {}", rows.len(), f.norm(), image.norm()))
}

pub fn gabor(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    let d = cfg.d;
    let grid = grid(cfg)?;
    let op = operator(&cfg.operator, d)?;
    let s = op.canonical_map(d)?;
    let g = gaussian_window(grid);
    let zs = PhaseGrid::from_points(d, cfg.phase_grid.sources.clone())?;
    let offsets = vec![Axis::centered(0.0, cfg.phase_grid.step, cfg.phase_grid.half_count); 2 * d];
    let mut rows = Vec::new();
    let mut best = (0.0f64, Vec::new(), Vec::new());
    gabor_matrix_visit(
        &op,
        &g,
        &g,
        &zs,
        |z| tracking_lattice(&s.apply(z), &offsets),
        |_, w, z, v: Complex64| {
            let mut r: Vec<String> = w.iter().chain(z).map(|c| num(*c)).collect();
            r.extend([num(v.re), num(v.im), num(v.norm())]);
            rows.push(r);
            if v.norm() > best.0 {
                best = (v.norm(), w.to_vec(), z.to_vec());
            }
        },
    )?;
    let mut header = columns("w", 2 * d);
    header.extend(columns("z", 2 * d));
    header.extend(["re", "im", "abs"].map(String::from));
    out.csv("gabor.csv", &header, &rows)?;
    let sz = s.apply(&best.2);
    let offset = best.1.iter().zip(&sz).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.json(
        "gabor.json",
        json!({
            "operator": op.describe(),
            "grid": grid,
            "sources": zs.len(),
            "targets_per_source": rows.len() / zs.len().max(1),
            "rows": rows.len(),
            "max_abs": best.0,
            "argmax": { "w": best.1, "z": best.2, "distance_to_sz": offset },
        }),
    )?;
    Ok(format!("{} entries, max |K| = {} at distance {offset} from Sz", rows.len(), best.0))
}

fn envelope(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    let set = &cfg.verify.envelope;
    let d = cfg.d;
    let mut members = Vec::new();
    if matches!(set.family, Family::FreeParticle | Family::Declared) {
        members.extend(free_particle_family(&set.ts, d)?);
    }
    if matches!(set.family, Family::Random | Family::Declared) {
        members.extend(random_family(&set.seeds, d, set.sigma_max)?);
    }
    if members.len() < 2 {
        return Err(CliError::validation("the envelope family needs at least two members"));
    }
    let ecfg = EnvelopeConfig {
        d,
        n_order: cfg.n_order,
        sources: cfg.phase_grid.sources.clone(),
        step: set.step,
        reach: set.reach,
        margin: set.margin,
    };
    let reports = members
        .par_iter()
        .map(|m| envelope_report(&m.label, &m.op, &ecfg))
        .collect::<Result<Vec<_>, _>>()?;
    let family = FamilyReport::new(reports, set.refined_limit, set.naive_floor);
    let header: Vec<String> =
        ["label", "sigma1", "det_sigma", "c_refined", "c_naive", "samples"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = family
        .members
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                num(r.sigma[0]),
                num(r.det_sigma),
                num(r.c_refined),
                num(r.c_naive),
                r.samples.to_string(),
            ]
        })
        .collect();
    out.csv("envelope.csv", &header, &rows)?;
    let proxy = match set.algebraic_s {
        Some(s_decay) if d == 1 => {
            let op = OperatorHandle::metaplectic(free_particle_flow(1.0, 1))?;
            let grid = GridSpec::new(1, 1024, 32.0)?;
            let sources = PhaseGrid::single(&[0.0, 0.0])?;
            let offsets = vec![Axis::centered(0.0, 0.5, 16); 2];
            Some(algebraic_window_report("free t=1 algebraic", &op, grid, s_decay, &offsets, &sources)?)
        }
        _ => None,
    };
    let passed = family.passes();
    let summary = format!(
        "refined spread {} (limit {}), naive spread {} (floor {}), naive increasing along S_t: {}",
        family.refined_spread,
        family.refined_limit,
        family.naive_spread,
        family.naive_floor,
        family.naive_increasing_along_free
    );
    out.json("envelope.json", json!({ "family": family, "algebraic_proxy": proxy, "passed": passed }))?;
    check(passed, summary)
}

fn dispersion(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    require_d1(cfg, "the dispersion check")?;
    let set = &cfg.verify.dispersion;
    check_span(&set.ts)?;
    let g = gaussian_window(GridSpec::new(1, set.n, set.half_width)?);
    let zs = PhaseGrid::from_points(1, set.sources.clone())?;
    let offsets = [Axis::centered(0.0, set.x_step, set.half_count), Axis::centered(0.0, set.xi_step, set.half_count)];
    let sups = set.ts.par_iter().map(|&t| dispersion_sup(t, &g, &zs, &offsets)).collect::<Result<Vec<_>, _>>()?;
    let fit = fit_slope(&set.ts, &sups)?;
    let rows: Vec<Vec<String>> = set.ts.iter().zip(&sups).map(|(t, s)| vec![num(*t), num(*s)]).collect();
    out.csv("dispersion.csv", &["t".into(), "sup_abs_k".into()], &rows)?;
    let passed = fit.slope_within(set.target, set.slope_tol) && fit.non_increasing;
    out.json("dispersion.json", json!({ "fit": fit, "passed": passed }))?;
    check(
        passed,
        format!("slope {} (target {} ± {}), non-increasing: {}", fit.slope, set.target, set.slope_tol, fit.non_increasing),
    )
}

fn lemmas(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    let set = &cfg.verify.lemmas;
    let line = LineGrid { a: set.a.clone(), b: set.b.clone(), sigma: set.sigma.clone(), v: set.v.clone() };
    let planar = PlanarGrid { sigma: set.planar_sigma.clone(), radii: set.planar_radii.clone(), ..PlanarGrid::default() };
    let mut sweeps: Vec<LemmaSweep> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    for &s in &set.s {
        if !(s > 1.0) {
            return Err(CliError::validation(format!("lemma exponents must exceed 1, got {s}")));
        }
        for kind in [LemmaKind::ShiftedDilated, LemmaKind::DilatedWeight, LemmaKind::Isotropic] {
            let reports =
                line_tuples(kind, &line).into_par_iter().map(|t| line_check(kind, t, s)).collect::<Result<_, _>>()?;
            sweeps.push(assemble(kind, s, reports));
        }
        let dd = 2.0 * cfg.d as f64;
        if cfg.d != 1 {
            skipped.push(format!("planar s={s}: evaluated for d = 1 only"));
        } else if s <= dd {
            skipped.push(format!("planar s={s}: needs s > {dd}"));
        } else {
            let reports = planar_tuples(&planar)
                .into_par_iter()
                .map(|(sg, v)| planar_convolution_check(&[sg], &v, s))
                .collect::<Result<_, _>>()?;
            sweeps.push(assemble(LemmaKind::Planar, s, reports));
        }
    }
    let tol = 1e-6;
    let header: Vec<String> = ["kind", "s", "a", "b", "sigma", "v", "lhs", "rhs", "ratio", "quadrature_error", "truncation_error"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for sw in &sweeps {
        for r in &sw.reports {
            let v: Vec<String> = r.v.iter().map(|c| num(*c)).collect();
            let sg: Vec<String> = r.sigma.iter().map(|c| num(*c)).collect();
            rows.push(vec![
                format!("{:?}", r.kind),
                num(r.s),
                num(r.a),
                num(r.b),
                sg.join(" "),
                v.join(" "),
                num(r.lhs),
                num(r.rhs),
                num(r.ratio),
                num(r.quadrature_error),
                num(r.truncation_error),
            ]);
        }
    }
    out.csv("lemmas.csv", &header, &rows)?;
    let bounds: Vec<Value> = sweeps
        .iter()
        .map(|sw| {
            json!({
                "kind": sw.kind, "s": sw.s, "max_ratio": sw.max_ratio,
                "analytic_constant": sw.analytic_constant,
                "max_truncation_error": sw.max_truncation_error,
                "max_quadrature_error": sw.max_quadrature_error,
                "passed": sw.passes(tol),
            })
        })
        .collect();
    let passed = sweeps.iter().all(|sw| sw.passes(tol));
    out.json("lemmas.json", json!({ "bounds": bounds, "skipped": skipped, "sweeps": sweeps, "passed": passed }))?;
    let worst = sweeps.iter().map(|sw| sw.max_ratio).fold(0.0, f64::max);
    check(passed, format!("{} sweeps, {} tuples, largest ratio {worst}", sweeps.len(), rows.len()))
}

fn cone(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    require_d1(cfg, "the cone check")?;
    let set = &cfg.verify.cone;
    let grid = GridSpec::new(1, set.n, set.half_width)?;
    let g = gaussian_window(grid);
    let f = signal(&cfg.input, grid)?;
    let outer = ConeSpec::around_axis(1, 0, set.outer_half_angle.to_radians(), grid.h())?;
    let inner = ConeSpec::around_axis(1, 0, set.inner_half_angle.to_radians(), grid.h())?;
    let reports = set
        .ts
        .par_iter()
        .map(|&t| cone_propagation_check(&f, &g, &g, &free_particle_flow(t, 1), &outer, &inner, set.r, set.margin))
        .collect::<Result<Vec<_>, _>>()?;
    let sweep = ConeSweep::new(set.ts.iter().map(|t| format!("free t={t}")).collect(), reports, set.bound);
    let header: Vec<String> =
        ["label", "det_sigma", "lhs", "rhs_cone", "rhs_residual", "bracket", "ratio"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = sweep
        .labels
        .iter()
        .zip(&sweep.reports)
        .map(|(l, r)| {
            vec![l.clone(), num(r.det_sigma), num(r.lhs), num(r.rhs_cone), num(r.rhs_residual), num(r.bracket), num(r.ratio)]
        })
        .collect();
    out.csv("cone.csv", &header, &rows)?;
    let passed = sweep.passes();
    out.json("cone.json", json!({ "sweep": sweep, "passed": passed }))?;
    check(passed, format!("max ratio {} (bound {})", sweep.max_ratio, sweep.bound))
}

fn norms(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    require_d1(cfg, "the norm-growth check")?;
    let set = &cfg.verify.norms;
    let grid = GridSpec::new(1, set.n, set.half_width)?;
    let named = default_battery(grid)?;
    let battery: Vec<DiscreteSignal> = named.iter().map(|(_, f)| f.clone()).collect();
    let tuples: Vec<(f64, f64)> = set.ts.iter().flat_map(|&t| set.p.iter().map(move |p| (t, p.0))).collect();
    let reports = tuples
        .par_iter()
        .map(|&(t, p)| norm_growth_check(&free_particle_flow(t, 1), &battery, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut passed = true;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (&(t, p), r) in tuples.iter().zip(&reports) {
        let ok = if p == 2.0 {
            (r.max_ratio - 1.0).abs() <= 1e-6 && (r.min_ratio - 1.0).abs() <= 1e-6
        } else {
            r.normalized <= set.bound
        };
        passed &= ok;
        rows.push(vec![num(t), num(p), num(r.det_sigma), num(r.factor), num(r.max_ratio), num(r.min_ratio), num(r.normalized)]);
        records.push(json!({
            "t": t, "p": num(p), "det_sigma": r.det_sigma, "factor": r.factor,
            "ratios": r.ratios, "max_ratio": r.max_ratio, "min_ratio": r.min_ratio,
            "normalized": r.normalized, "passed": ok,
        }));
    }
    let header: Vec<String> =
        ["t", "p", "det_sigma", "factor", "max_ratio", "min_ratio", "normalized"].map(String::from).to_vec();
    out.csv("norms.csv", &header, &rows)?;
    let names: Vec<&str> = named.iter().map(|(n, _)| n.as_str()).collect();
    out.json("norms.json", json!({ "battery": names, "records": records, "bound": set.bound, "passed": passed }))?;
    let worst = reports.iter().filter(|r| r.p != 2.0).map(|r| r.normalized).fold(0.0, f64::max);
    check(passed, format!("{} cases, largest ratio/(det Σ)^(1/2) {worst} (bound {})", reports.len(), set.bound))
}

fn boxed(cfg: &RunConfig, out: &mut OutputDir) -> Result<String, CliError> {
    require_d1(cfg, "the box demonstration")?;
    let set = &cfg.verify.boxed;
    let records = set.ts.par_iter().map(|&t| box_stretch_demo(t, set.threshold)).collect::<Result<Vec<_>, _>>()?;
    let header: Vec<String> =
        ["t", "sigma", "rho", "x_extent", "stretch_vs_box", "stretch_vs_t0", "measured_x_extent"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                num(r.t),
                num(r.sigma),
                num(r.rho),
                num(r.x_extent),
                num(r.stretch_vs_box),
                num(r.stretch_vs_t0),
                num(r.measured_x_extent),
            ]
        })
        .collect();
    out.csv("box.csv", &header, &rows)?;
    let growing = records.windows(2).all(|w| w[1].measured_x_extent > w[0].measured_x_extent);
    out.json("box.json", json!({ "records": records, "measured_extent_increasing": growing, "passed": growing }))?;
    check(growing, format!("measured x-extents {:?}", records.iter().map(|r| r.measured_x_extent).collect::<Vec<_>>()))
}

pub fn verify(cfg: &RunConfig, which: Check, out: &mut OutputDir) -> Result<String, CliError> {
    match which {
        Check::Envelope => envelope(cfg, out),
        Check::Dispersion => dispersion(cfg, out),
        Check::Lemmas => lemmas(cfg, out),
        Check::Cone => cone(cfg, out),
        Check::Norms => norms(cfg, out),
        Check::Box => boxed(cfg, out),
    }
}

/// `U(t)g`, its spectrogram, the Euler factors of `S_t` and the stretched box.
pub fn demo_free_particle(cfg: &RunConfig, t: f64, out: &mut OutputDir) -> Result<String, CliError> {
    require_d1(cfg, "the free-particle demo")?;
    if !(t >= 0.0) {
        return Err(CliError::validation("t must be nonnegative"));
    }
    let grid = box_grid(t)?;
    let g = gaussian_window(grid);
    let s = free_particle_flow(t, 1);
    let u = OperatorHandle::metaplectic(s.clone())?.apply(&g)?;
    let (header, rows) = signal_rows(&u);
    out.csv("free_particle_signal.csv", &header, &rows)?;
    let lattice = PhaseGrid::signal_lattice_strided(&grid, 4, 4);
    let mut spec = Vec::new();
    stft_visit(&u, &g, &lattice, |_, z, v| spec.push(vec![num(z[0]), num(z[1]), num(v.norm())]))?;
    out.csv("free_particle_spectrogram.csv", &["x".into(), "xi".into(), "abs".into()], &spec)?;
    let dec = euler_decompose(&s)?;
    let record = box_stretch_demo(t, cfg.verify.boxed.threshold)?;
    out.json(
        "free_particle.json",
        json!({
            "t": t,
            "sigma_closed_form": free_particle_sigma(t),
            "sigma": dec.sigma(),
            "u": matrix_json(dec.u()),
            "v": matrix_json(dec.v()),
            "box": record,
            "grid": grid,
        }),
    )?;
    Ok(format!("t = {t}: σ = {}, measured x-extent {}", dec.sigma()[0], record.measured_x_extent))
}
