//! The four computations behind the subcommands. Each returns its artifacts
//! in memory together with a short summary for stdout; nothing touches disk
//! here.

use cdgsk_core::bloch::{self, XiGrid};
use cdgsk_core::evolve::{self, GrowthParams};
use cdgsk_core::profile::{self, WaveProfile};
use cdgsk_core::reduced::{self, ReducedModel};
use cdgsk_core::Complex64;
use serde_json::{json, Value};

use crate::config::{EvolveConfig, ProfileConfig, ReducedConfig, SpectrumConfig};
use crate::error::CliError;
use crate::format::{self, complex_json, complex_list_json, matrix3_json, opt_f64, Cell, Table};
use crate::scan;

/// Below this amplitude the Bloch matrix is built from the order-3
/// asymptotic profile; above it from the Newton solution.
pub const ASYMPTOTIC_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone)]
pub enum Body {
    Json(Value),
    Csv(Table),
    /// Eigenvalues and a title.
    Svg(Vec<Complex64>, String),
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: &'static str,
    pub body: Body,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Value,
}

/// Newton solve, by continuation once `|a|` exceeds one continuation step.
pub fn solve_wave(
    a: f64,
    k: f64,
    n: usize,
    tol: f64,
) -> Result<profile::NewtonSolution, CliError> {
    // Checked here so the error names `a`, not a continuation point.
    if !(a.abs() <= profile::MAX_AMPLITUDE) {
        return Err(profile::ProfileError::Amplitude {
            a,
            max: profile::MAX_AMPLITUDE,
        }
        .into());
    }
    if a.abs() <= profile::CONTINUATION_STEP {
        return Ok(profile::newton_solve(a, k, n, tol, None)?);
    }
    let path = profile::continuation(a, k, n, tol)?;
    Ok(path.into_iter().last().expect("continuation has at least one point"))
}

fn profile_json(sol: &profile::NewtonSolution) -> Value {
    let p = &sol.profile;
    json!({
        "a": p.a(),
        "k": p.k(),
        "c": p.c(),
        "series": format::series_json(p.w()),
        "residual_norm": sol.residual_norm,
        "iterations": sol.iterations,
        "tail_ratio": p.tail_ratio(),
    })
}

pub fn profile(cfg: &ProfileConfig) -> Result<Outcome, CliError> {
    let sols = cfg
        .amplitudes
        .iter()
        .map(|&a| solve_wave(a, cfg.k, cfg.n, cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(vec!["a", "order", "sup_error", "c_newton", "c_asymptotic"]);
    let mut remainder = (Vec::new(), Vec::new());
    for sol in &sols {
        let p = &sol.profile;
        for order in 1..=3u32 {
            let asym = profile::asymptotic_profile(p.a(), cfg.k, order, cfg.n)?;
            let err = p.w().sub(asym.w()).expect("equal orders").sup_norm();
            table.push(vec![
                Cell::F(p.a()),
                Cell::I(order as i64),
                Cell::F(err),
                Cell::F(p.c()),
                Cell::F(asym.c()),
            ]);
            if order == 3 && p.a() != 0.0 && err > 0.0 {
                remainder.0.push(p.a().abs());
                remainder.1.push(err);
            }
        }
    }
    let remainder_slope = if remainder.0.len() >= 2 {
        opt_f64(reduced::loglog_slope(&remainder.0, &remainder.1))
    } else {
        Value::Null
    };

    let fit = if cfg.fit {
        let samples: Vec<(f64, f64)> = sols.iter().map(|s| (s.profile.a(), s.profile.c())).collect();
        let f = profile::fit_speed_coefficients(&samples)?;
        let k4 = cfg.k.powi(4);
        json!({
            "c0": f.c0,
            "c2": f.c2,
            "c4": f.c4,
            "c0_relative_error": (f.c0 - k4).abs() / k4,
            "c2_relative_error": (f.c2 - profile::C2).abs() / profile::C2,
        })
    } else {
        Value::Null
    };

    let mut doc = json!({
        "k": cfg.k,
        "N": cfg.n,
        "tol": cfg.tol,
        "profiles": sols.iter().map(profile_json).collect::<Vec<_>>(),
        "remainder_slope": remainder_slope,
        "fit": fit,
    });
    // A single solve also exposes its fields at top level.
    if let [one] = sols.as_slice() {
        if let (Value::Object(top), Value::Object(p)) = (&mut doc, profile_json(one)) {
            top.extend(p);
        }
    }
    let last = &sols[sols.len() - 1];
    let summary = json!({
        "a": last.profile.a(),
        "c": last.profile.c(),
        "residual_norm": last.residual_norm,
        "profiles": sols.len(),
        "remainder_slope": doc["remainder_slope"],
        "c2_fit": doc["fit"]["c2"],
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "profile.json",
                body: Body::Json(doc),
            },
            Artifact {
                name: "profile_asymptotics.csv",
                body: Body::Csv(table),
            },
        ],
        summary,
    })
}

/// Profile used for spectra: Newton above [`ASYMPTOTIC_AMPLITUDE`].
fn spectral_profile(cfg: &SpectrumConfig) -> Result<(WaveProfile, &'static str, f64), CliError> {
    if cfg.a.abs() <= ASYMPTOTIC_AMPLITUDE {
        let p = profile::asymptotic_profile(cfg.a, cfg.k, 3, cfg.profile_n)?;
        let r = p.residual_norm();
        Ok((p, "asymptotic", r))
    } else {
        let sol = solve_wave(cfg.a, cfg.k, cfg.profile_n, crate::config::PROFILE_TOL)?;
        Ok((sol.profile, "newton", sol.residual_norm))
    }
}

pub fn spectrum(cfg: &SpectrumConfig) -> Result<Outcome, CliError> {
    let (prof, source, residual) = spectral_profile(cfg)?;
    let grid = match (cfg.xi, cfg.grid) {
        (Some(xi), _) => XiGrid::single(xi)?,
        (None, Some(n)) => XiGrid::uniform(n)?,
        (None, None) => XiGrid::uniform(bloch::DEFAULT_GRID_POINTS)?,
    };
    let (report, slices) = scan::parallel_scan(&prof, &grid, cfg.n, cfg.tol)?;

    let co_periodic = slices.iter().find(|s| s.xi == 0.0).map(|s| {
        let (re, l) = s.max_re();
        json!({
            "max_re": re,
            "argmax_lambda": complex_json(l),
            "verdict": bloch::Verdict::classify(re, cfg.tol).as_str(),
        })
    });
    let doc = json!({
        "a": report.a,
        "k": report.k,
        "c": prof.c(),
        "N": report.n_max,
        "profile_source": source,
        "profile_residual_norm": residual,
        "tol": report.tol,
        "max_re": report.max_re,
        "max_abs_re": report.max_abs_re,
        "argmax_xi": report.argmax_xi,
        "argmax_lambda": complex_json(report.argmax_lambda),
        "grid_points": report.grid_points,
        "grid_min": report.grid_min,
        "grid_max": report.grid_max,
        "grid_includes_zero": report.grid_includes_zero,
        "symmetry_defect": report.symmetry_defect,
        "max_deflation_residual": report.max_deflation_residual,
        "verdict": report.verdict.as_str(),
        "co_periodic": co_periodic,
    });

    let mut table = Table::new(vec!["xi", "re", "im"]);
    let mut points = Vec::new();
    for s in &slices {
        for &l in &s.eigenvalues {
            table.push(vec![Cell::F(s.xi), Cell::F(l.re), Cell::F(l.im)]);
            points.push(l);
        }
    }
    let title = format!(
        "spectrum a={} k={} N={} grid={}",
        report.a, report.k, report.n_max, report.grid_points
    );
    let summary = json!({
        "max_re": report.max_re,
        "verdict": report.verdict.as_str(),
        "symmetry_defect": report.symmetry_defect,
        "grid_points": report.grid_points,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact {
                name: "spectrum.json",
                body: Body::Json(doc),
            },
            Artifact {
                name: "spectrum_eigenvalues.csv",
                body: Body::Csv(table),
            },
            Artifact {
                name: "spectrum.svg",
                body: Body::Svg(points, title),
            },
        ],
        summary,
    })
}

fn cubic_json(c: &[Complex64; 3]) -> Value {
    complex_list_json(c)
}

fn model_json(m: &ReducedModel) -> Value {
    let d = &m.discriminant;
    json!({
        "a": m.a,
        "xi": m.xi,
        "k": m.k,
        "N": m.n_max,
        "b_num": matrix3_json(|i, j| m.b_num[(i, j)]),
        "b_closed": matrix3_json(|i, j| m.b_closed[(i, j)]),
        "gram": matrix3_json(|i, j| m.gram[(i, j)]),
        "b_error": m.b_error(),
        "b_error_transposed": m.b_error_transposed(),
        "cubic_num": cubic_json(&m.cubic_num),
        "cubic_closed_form": cubic_json(&m.cubic_closed),
        "interior_eigenvalues": complex_list_json(&m.interior),
        "closed_form_roots": complex_list_json(&m.closed_roots),
        "root_error": m.root_error(),
        "representation_error": m.representation_error(),
        "trace_defect": m.trace_defect(),
        "projector_deviation": m.projector_deviation,
        "intertwining_defect": m.intertwining_defect,
        "discriminant": {
            "delta": d.delta,
            "delta_from_coefficients": d.delta_from_coefficients,
            "leading": d.leading,
            "ratio_to_leading": opt_f64(d.ratio_to_leading()),
            "positive": d.delta > 0.0,
            "roots": complex_list_json(&d.roots),
            "max_imag": d.max_imag,
            "scale": d.scale,
            "all_roots_real": d.all_roots_real,
            "consistent": d.consistent(),
        },
    })
}

/// Appendix checks and basis-coefficient comparison at the origin.
fn appendix_json(k: f64, n: usize) -> Result<(Value, bool), CliError> {
    let rep = reduced::appendix_derivative_checks(k, n)?;
    let num = reduced::basis_expansion(k)?;
    let closed = reduced::closed_basis_expansion(k, reduced::EXPANSION_N);
    let checks = reduced::compare_expansions(&num, &closed);
    let basis: Vec<Value> = checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "error": c.error,
                "passed": c.error <= reduced::DERIVATIVE_TOL,
            })
        })
        .collect();
    let derivatives: serde_json::Map<String, Value> =
        rep.derivatives.iter().map(|(n, e)| (n.clone(), json!(e))).collect();
    let passed = rep.passed();
    Ok((
        json!({
            "passed": passed,
            "tolerance": reduced::DERIVATIVE_TOL,
            "derivatives": derivatives,
            "resolvent_error": rep.resolvent_error,
            "flat_action_error": rep.flat_action_error,
            "phi1_a_error": rep.phi1_a_error,
            "basis_coefficients": basis,
            "basis_passed": checks.iter().all(|c| c.error <= reduced::DERIVATIVE_TOL),
        }),
        passed,
    ))
}

pub fn reduced(cfg: &ReducedConfig) -> Result<Outcome, CliError> {
    let sol = solve_wave(cfg.a, cfg.k, profile::DEFAULT_N, crate::config::PROFILE_TOL)?;
    let model = reduced::reduced_matrix(&sol.profile, cfg.xi, cfg.n)?;
    let mut doc = model_json(&model);
    let mut artifacts = Vec::new();
    let mut summary = json!({
        "b_error": model.b_error(),
        "root_error": model.root_error(),
        "delta": model.discriminant.delta,
        "all_roots_real": model.discriminant.all_roots_real,
    });

    // Errors vanish identically at the origin, so no slope exists there.
    if cfg.regression && (cfg.a != 0.0 || cfg.xi != 0.0) {
        let reg = reduced::order_regression(
            cfg.a,
            cfg.xi,
            cfg.k,
            cfg.n,
            &crate::config::regression_scales(),
        )?;
        let mut table = Table::new(vec![
            "scale",
            "a",
            "xi",
            "b_error",
            "b_error_transposed",
            "root_error",
            "projector_deviation",
        ]);
        for r in &reg.rows {
            table.push(
                [r.scale, r.a, r.xi, r.b_error, r.b_error_transposed, r.root_error, r.projector_deviation]
                    .into_iter()
                    .map(Cell::F)
                    .collect(),
            );
        }
        let slopes = json!({
            "b_slope": opt_f64(reg.b_slope),
            "b_slope_transposed": opt_f64(reg.b_slope_transposed),
            "root_slope": opt_f64(reg.root_slope),
            "projector_slope": opt_f64(reg.projector_slope),
        });
        doc["regression"] = slopes.clone();
        summary["regression"] = slopes;
        artifacts.push(Artifact {
            name: "reduced_regression.csv",
            body: Body::Csv(table),
        });
    } else {
        doc["regression"] = Value::Null;
    }

    if cfg.check_appendix {
        let (appendix, passed) = appendix_json(cfg.k, reduced::EXPANSION_N)?;
        summary["appendix_passed"] = json!(passed);
        summary["basis_passed"] = appendix["basis_passed"].clone();
        doc["appendix"] = appendix;
    }
    artifacts.insert(
        0,
        Artifact {
            name: "reduced.json",
            body: Body::Json(doc),
        },
    );
    Ok(Outcome { artifacts, summary })
}

/// Base steps of the convergence table; each row halves once more.
pub const STUDY_STEPS: [f64; 3] = [evolve::STUDY_DT, evolve::STUDY_DT / 2.0, evolve::STUDY_DT / 4.0];

pub fn evolve(cfg: &EvolveConfig, growth: bool, study: bool) -> Result<Outcome, CliError> {
    let sol = solve_wave(cfg.a, cfg.k, profile::DEFAULT_N, crate::config::PROFILE_TOL)?;
    let prof = &sol.profile;
    let mut doc = json!({
        "a": cfg.a,
        "k": cfg.k,
        "c": prof.c(),
        "seed": cfg.seed,
        "dt": cfg.dt,
        "N": cfg.n,
        "T": cfg.t_end,
        "epsilon": cfg.epsilon,
        "perturbation_modes": evolve::PERTURBATION_MODES,
    });
    let mut summary = json!({});
    let mut artifacts = Vec::new();

    if growth {
        let params = GrowthParams {
            epsilon: cfg.epsilon,
            t_end: cfg.t_end,
            dt: cfg.dt,
            n_max: cfg.n,
            record_every: cfg.record_every,
        };
        let rec = evolve::perturbation_growth(prof, cfg.seed, params)?;
        let mut table = Table::new(vec!["t", "distance", "sup"]);
        for s in &rec.samples {
            table.push(vec![Cell::F(s.t), Cell::F(s.distance), Cell::F(s.sup)]);
        }
        let g = json!({
            "initial_distance": rec.initial_distance,
            "max_distance": rec.max_distance,
            "growth": rec.growth,
            "mean_drift": rec.mean_drift,
            "samples": rec.samples.len(),
        });
        doc["growth"] = g.clone();
        summary["growth"] = g;
        artifacts.push(Artifact {
            name: "evolve_growth.csv",
            body: Body::Csv(table),
        });
    }

    if study {
        let r = evolve::random_perturbation(cfg.seed, cfg.n, evolve::STUDY_MODES)
            .scale(cfg.a.abs() / 2.0);
        let u0 = prof.w().resized(cfg.n).add(&r).expect("equal orders");
        let mut table = Table::new(vec!["dt", "error_coarse", "error_fine", "ratio"]);
        let mut rows = Vec::new();
        for &dt in &STUDY_STEPS {
            let st = evolve::convergence_study(&u0, cfg.k, prof.c(), evolve::STUDY_T_END, dt)?;
            table.push(vec![
                Cell::F(st.dt),
                Cell::F(st.error_coarse),
                Cell::F(st.error_fine),
                Cell::F(st.ratio),
            ]);
            rows.push(json!({
                "dt": st.dt,
                "error_coarse": st.error_coarse,
                "error_fine": st.error_fine,
                "ratio": opt_f64(st.ratio),
            }));
        }
        let s = json!({
            "T": evolve::STUDY_T_END,
            "perturbation": cfg.a.abs() / 2.0,
            "rows": rows,
        });
        summary["dt_study"] = s["rows"].clone();
        doc["dt_study"] = s;
        artifacts.push(Artifact {
            name: "evolve_dt_study.csv",
            body: Body::Csv(table),
        });
    }
    artifacts.insert(
        0,
        Artifact {
            name: "evolve.json",
            body: Body::Json(doc),
        },
    );
    Ok(Outcome { artifacts, summary })
}
