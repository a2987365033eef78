//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mpgabor_core::metaplectic::{metaplectic_oracle, MetaplecticOperator};
use mpgabor_core::phase::{Axis, ConeSpec, PhaseGrid};
use mpgabor_core::signal::{gaussian_window, phase_aligned_error};
use mpgabor_core::symplectic::{
    euler_decompose, free_particle_euler, free_particle_flow, free_particle_sigma, random_symplectic,
};
use mpgabor_core::tf::{moyal_check, stft_wigner_residual};
use mpgabor_core::verify::cone::{cone_propagation_check, ConeSweep};
use mpgabor_core::verify::dispersion::dispersive_slope;
use mpgabor_core::verify::envelope::{
    envelope_report, free_particle_family, random_family, EnvelopeConfig, FamilyReport,
};
use mpgabor_core::verify::lemmas::{line_sweep, planar_sweep, LemmaKind, LineGrid, PlanarGrid};
use mpgabor_core::verify::norms::{default_battery, norm_growth_check};
use mpgabor_core::{DiscreteSignal, GridSpec};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn c1_euler() -> Outcome {
    let (mut recon, mut rot, mut ordered) = (0.0f64, 0.0f64, true);
    for seed in 0..100u64 {
        let d = 1 + (seed % 3) as usize;
        let s = random_symplectic(seed, d, 16.0).unwrap();
        let dec = euler_decompose(&s).unwrap();
        recon = recon.max(dec.reconstruction_residual(&s));
        rot = rot.max(dec.rotation_residual());
        ordered &= dec.sigma().windows(2).all(|w| w[0] >= w[1]) && dec.sigma().iter().all(|&x| x >= 1.0 - 1e-12);
    }
    outcome(
        recon <= 1e-9 && rot <= 1e-9 && ordered,
        format!("100 matrices: max ‖UᵀDV − S‖ {recon:.1e}, rotation residual {rot:.1e}, ordered {ordered}"),
    )
}

fn c2_free_particle() -> Outcome {
    let (mut sig, mut recon) = (0.0f64, 0.0f64);
    for t in [0.0, 0.5, 1.0, 2.0, 8.0] {
        let s = free_particle_flow(t, 1);
        let exact = (1.0 + t * t).sqrt() + t;
        sig = sig.max((euler_decompose(&s).unwrap().sigma()[0] - exact).abs());
        sig = sig.max((free_particle_sigma(t) - exact).abs());
        recon = recon.max(free_particle_euler(t, 1).unwrap().reconstruction_residual(&s));
    }
    outcome(sig <= 1e-8 && recon <= 1e-10, format!("σ(t) error {sig:.1e}, closed-form UᵀDV residual {recon:.1e}"))
}

fn c3_oracle() -> Outcome {
    let g = gaussian_window(GridSpec::new(1, 512, 8.0).unwrap());
    let mut ops: Vec<_> = (0..20).map(|k| random_symplectic(500 + k, 1, 4.0).unwrap()).collect();
    ops.extend([0.5, 1.0, 2.0].map(|t| free_particle_flow(t, 1)));
    let mut worst = 0.0f64;
    for s in &ops {
        let fast = MetaplecticOperator::new(s.clone()).unwrap().apply(&g).unwrap();
        worst = worst.max(phase_aligned_error(&fast, &metaplectic_oracle(s, &g).unwrap()).unwrap());
    }
    outcome(worst <= 1e-6, format!("{} operators, max phase-aligned relative L² error {worst:.1e}", ops.len()))
}

fn c4_moyal() -> Outcome {
    let grid = GridSpec::new(1, 512, 8.0).unwrap();
    let g = gaussian_window(grid);
    let hermite = |k: usize| -> DiscreteSignal {
        let f = g.map(|y, v| {
            let u = (2.0 * PI).sqrt() * y[0];
            let (mut a, mut b) = (1.0, 2.0 * u);
            if k == 0 {
                return v;
            }
            for j in 1..k {
                (a, b) = (b, 2.0 * u * b - 2.0 * j as f64 * a);
            }
            v * b
        });
        f.scale((1.0 / f.norm()).into())
    };
    let battery: Vec<DiscreteSignal> = (0..4).map(hermite).collect();
    let pg = PhaseGrid::lattice(1, vec![Axis::centered(0.0, 0.25, 12), Axis::centered(0.0, 0.25, 12)]).unwrap();
    let (mut moyal, mut wig) = (0.0f64, 0.0f64);
    for f in &battery {
        for h in &battery {
            moyal = moyal.max(moyal_check(f, &g, h, &g).unwrap());
        }
        wig = wig.max(stft_wigner_residual(f, &g, &pg).unwrap());
    }
    outcome(moyal <= 1e-6 && wig <= 1e-6, format!("Moyal residual {moyal:.1e}, |W| vs |V| residual {wig:.1e}"))
}

fn c5_envelope() -> Outcome {
    let cfg = EnvelopeConfig::default_for(1);
    let mut members = free_particle_family(&[0.0, 1.0, 2.0, 4.0, 8.0], 1).unwrap();
    members.extend(random_family(&(0..10).collect::<Vec<_>>(), 1, 8.0).unwrap());
    let reports = members.iter().map(|m| envelope_report(&m.label, &m.op, &cfg).unwrap()).collect();
    let fam = FamilyReport::new(reports, 100.0, 1000.0);
    outcome(
        fam.passes(),
        format!(
            "refined spread {:.3} (≤ 100), naive spread {:.1} (≥ 1000), naive increasing along S_t {}",
            fam.refined_spread, fam.naive_spread, fam.naive_increasing_along_free
        ),
    )
}

fn c6_dispersion() -> Outcome {
    let g = gaussian_window(GridSpec::new(1, 8192, 512.0).unwrap());
    let zs = PhaseGrid::from_points(1, vec![0.0, 0.0, 0.0, 0.0625]).unwrap();
    let offsets = [Axis::centered(0.0, 0.125, 8), Axis::centered(0.0, 0.015625, 8)];
    let ts: Vec<f64> = (0..7).map(|k| f64::from(1 << k)).collect();
    let rep = dispersive_slope(&ts, &g, &zs, &offsets).unwrap();
    outcome(rep.slope_within(-0.5, 0.05), format!("slope {:.4} over t ∈ [1, 64]", rep.slope))
}

fn c7_lemmas() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for s in [1.5, 2.0, 3.0] {
        let mut worst = 0.0f64;
        let mut trunc = 0.0f64;
        for kind in [LemmaKind::ShiftedDilated, LemmaKind::DilatedWeight, LemmaKind::Isotropic] {
            let sw = line_sweep(kind, &LineGrid::default(), s).unwrap();
            ok &= sw.passes(1e-6);
            worst = worst.max(sw.max_ratio);
            trunc = trunc.max(sw.max_truncation_error);
        }
        if s > 2.0 {
            let sw = planar_sweep(&PlanarGrid::default(), s).unwrap();
            ok &= sw.passes(1e-6);
            worst = worst.max(sw.max_ratio);
            trunc = trunc.max(sw.max_truncation_error);
        }
        lines.push(format!("s={s}: max ratio {worst:.3}, truncation {trunc:.0e}"));
    }
    outcome(ok, lines.join("; "))
}

fn c8_cone() -> Outcome {
    let grid = GridSpec::new(1, 512, 32.0).unwrap();
    let g = gaussian_window(grid);
    let outer = ConeSpec::around_axis(1, 0, PI / 6.0, grid.h()).unwrap();
    let inner = ConeSpec::around_axis(1, 0, PI / 12.0, grid.h()).unwrap();
    let ts = [1.0, 2.0, 4.0];
    let reports = ts
        .iter()
        .map(|&t| cone_propagation_check(&g, &g, &g, &free_particle_flow(t, 1), &outer, &inner, 1.0, 0.01).unwrap())
        .collect();
    let sweep = ConeSweep::new(ts.iter().map(|t| format!("t={t}")).collect(), reports, 1.0);
    let ratios: Vec<String> = sweep.reports.iter().map(|r| format!("{:.4}", r.ratio)).collect();
    outcome(sweep.passes(), format!("ratios [{}] ≤ C = 1", ratios.join(", ")))
}

fn c9_norms() -> Outcome {
    let grid = GridSpec::new(1, 1024, 64.0).unwrap();
    let battery: Vec<DiscreteSignal> = default_battery(grid).unwrap().into_iter().map(|(_, f)| f).collect();
    let (mut unitary, mut worst) = (0.0f64, 0.0f64);
    for t in [1.0, 2.0, 4.0, 8.0] {
        let s = free_particle_flow(t, 1);
        let two = norm_growth_check(&s, &battery, 2.0).unwrap();
        unitary = unitary.max((two.max_ratio - 1.0).abs()).max((two.min_ratio - 1.0).abs());
        for p in [1.0, f64::INFINITY] {
            let r = norm_growth_check(&s, &battery, p).unwrap();
            // (det Σ)^{1/2} for p ∈ {1, ∞}
            worst = worst.max(r.max_ratio / r.det_sigma.sqrt());
        }
    }
    outcome(
        unitary <= 1e-6 && worst <= 1.0,
        format!("|p=2 ratio − 1| {unitary:.1e}, max ratio/(det Σ)^(1/2) for p ∈ {{1, ∞}} {worst:.3} ≤ C = 1"),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "failure.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 11] = [
        &["decompose", "--seed", "7", "--d", "2"],
        &["apply", "--free-particle-t", "1"],
        &["gabor", "--free-particle-t", "2"],
        &["verify", "envelope", "--family", "free-particle"],
        &["verify", "dispersion"],
        &["verify", "lemmas", "--s", "2"],
        &["verify", "cone"],
        &["verify", "norms"],
        &["verify", "box"],
        &["demo", "free-particle", "--free-particle-t", "2"],
        &["decompose", "--identity", "--d", "3"],
    ];
    let mut differing = Vec::new();
    for (k, args) in commands.iter().enumerate() {
        let dir = tmp.path().join(k.to_string());
        let run = |extra: &[&str], threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_mpgabor"))
                .args(extra)
                .env("MPGABOR_THREADS", threads)
                .output()
                .unwrap()
                .status
                .code()
        };
        let mut first_args = args.to_vec();
        let dir_s = dir.to_string_lossy().into_owned();
        first_args.extend(["--out", &dir_s]);
        let c1 = run(&first_args, "1");
        let first = snapshot(&dir);
        let resolved = dir.join("config.resolved.json").to_string_lossy().into_owned();
        let mut again: Vec<&str> = args.iter().take_while(|a| !a.starts_with("--")).copied().collect();
        again.extend(["--config", &resolved]);
        let c2 = run(&again, "3");
        if c1 != c2 || first != snapshot(&dir) || first.len() < 2 {
            differing.push(args.join(" "));
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} commands rerun from their resolved configs, outputs byte-identical", commands.len())
        } else {
            format!("outputs differ for: {}", differing.join("; "))
        },
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("Euler round-trip", c1_euler, Some(Duration::from_secs(5))),
        ("free-particle closed form", c2_free_particle, None),
        ("operator oracle equivalence", c3_oracle, Some(Duration::from_secs(60))),
        ("Moyal and Wigner relations", c4_moyal, None),
        ("refined-envelope family stability", c5_envelope, Some(Duration::from_secs(600))),
        ("dispersive slope", c6_dispersion, None),
        ("convolution inequality sweeps", c7_lemmas, Some(Duration::from_secs(120))),
        ("cone propagation", c8_cone, Some(Duration::from_secs(300))),
        ("norm growth", c9_norms, None),
        ("CLI determinism", c10_determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut out = f();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > *limit {
                out.passed = false;
                out.detail.push_str(&format!("; took {took:.1?}, limit {limit:?}"));
            }
        }
        failed += usize::from(!out.passed);
        let tag = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {} ({took:.2?})", k + 1, out.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
