//! One function per subcommand. Each resolves its inputs from flags and the
//! config file (flags win), runs the library, and renders the report in the
//! requested format plus any plot-data tables.

use extremal::admissible::{
    extremal_polynomial, min_positive_angle, AdmissibleClass, AngleThreshold, BaseFactor,
};
use extremal::classify::{self, MomentumProfile, Regime};
use extremal::energy::{
    calabi_minimizing_sequence_profile, k_energy_along, properness_breaker_profile,
    unbounded_direction_profile, ConvexBump,
};
use extremal::quad::integrate;
use extremal::rat::{rat, Rat};
use extremal::roots::isolate_roots;
use extremal::tf::{tf_delta_poly, tf_find_xs, TfCase};
use extremal::RatPoly;

use crate::config::{parse_factor, ClassSpec, FileConfig};
use crate::report::{
    case_text, class_lines, csv_string, interval_text, kv_csv, label_text, regime_text, to_json,
    ClassifyReport, CliError, Ctx, DeltaReport, DemoRow, EnergyDemoReport,
    ExtremalPolyReport, Output, OutputFormat, SplitCmdReport, SweepRow, TfSweepReport,
    TfXsReport, ThresholdReport,
};
use crate::{ClassArgs, DemoKind, EnergyDemoArgs, ExtremalPolyArgs, TfSweepArgs, TfXsArgs, ThresholdArgs};

/// Builds the class described by flags, the config's `class` block, or the
/// config's one-factor shorthand (`x`, `s`, optional `kappa`), in that order
/// of preference.
fn resolve_class(args: &ClassArgs, file: &FileConfig) -> Result<(ClassSpec, AdmissibleClass), CliError> {
    let spec = if !args.factors.is_empty() {
        let factors = args
            .factors
            .iter()
            .enumerate()
            .map(|(i, s)| parse_factor(i, s))
            .collect::<Result<Vec<_>, _>>()?;
        let kappa = args
            .kappa
            .clone()
            .or_else(|| file.kappa.clone())
            .unwrap_or_else(Rat::one);
        ClassSpec { factors, kappa }
    } else if let Some(c) = &file.class {
        let mut c = c.clone();
        if let Some(k) = &args.kappa {
            c.kappa = k.clone();
        }
        c
    } else if let (Some(x), Some(s)) = (&file.x, &file.s) {
        ClassSpec {
            factors: vec![BaseFactor {
                d: 1,
                s: s.clone(),
                x: x.clone(),
            }],
            kappa: args
                .kappa
                .clone()
                .or_else(|| file.kappa.clone())
                .unwrap_or_else(Rat::one),
        }
    } else {
        return Err(CliError::Input(
            "no class given: pass --factor (and --kappa), or a config with a `class` block"
                .into(),
        ));
    };
    let class = AdmissibleClass::new(spec.factors.clone(), spec.kappa.clone())?;
    Ok((spec, class))
}

fn resolve_factors(flag: &[String], file: &FileConfig) -> Result<Vec<BaseFactor>, CliError> {
    if !flag.is_empty() {
        return flag
            .iter()
            .enumerate()
            .map(|(i, s)| parse_factor(i, s))
            .collect();
    }
    if let Some(c) = &file.class {
        return Ok(c.factors.clone());
    }
    if let (Some(x), Some(s)) = (&file.x, &file.s) {
        return Ok(vec![BaseFactor {
            d: 1,
            s: s.clone(),
            x: x.clone(),
        }]);
    }
    Err(CliError::Input(
        "no factors given: pass --factor, or a config with a `class` block".into(),
    ))
}

fn default_width(explicit: Option<Rat>, file: &FileConfig) -> Rat {
    explicit
        .or_else(|| file.width.clone())
        .unwrap_or_else(|| rat(1, 1 << 20))
}

pub fn classify_cmd(args: &ClassArgs, file: &FileConfig, ctx: &Ctx) -> Result<Output, CliError> {
    let (spec, class) = resolve_class(args, file)?;
    let regime = classify::classify(&class)?;
    let report = ClassifyReport {
        command: "classify",
        seed: ctx.seed,
        class: spec,
        regime,
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec!["command: classify".to_string()];
            lines.extend(class_lines(&report.class));
            lines.push(format!("regime: {}", regime_text(regime)));
            lines.join("\n")
        }
        OutputFormat::Csv => kv_csv(&[("regime", regime_text(regime).to_string())])?,
    };
    Ok(Output {
        stdout,
        plots: vec![],
    })
}

fn poly_text(p: &RatPoly) -> String {
    p.coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn extremal_poly_cmd(
    args: &ExtremalPolyArgs,
    file: &FileConfig,
    ctx: &Ctx,
) -> Result<Output, CliError> {
    let (spec, class) = resolve_class(&args.class, file)?;
    let data = extremal_polynomial(&class)?;
    let grid = args.grid.or(file.grid).unwrap_or(65);
    if !(2..=1_000_000).contains(&grid) {
        return Err(CliError::Input(format!(
            "grid = {grid} must be between 2 and 1000000"
        )));
    }
    // Evenly spaced exact sample points z_i = (2i - (g-1))/(g-1), i = 0..g.
    let n = grid as i64 - 1;
    let mut samples = vec![vec!["z".to_string(), "f_omega".to_string()]];
    for i in 0..=n {
        let z = Rat::new(2 * i - n, n);
        let v = data.f_omega.eval(&z);
        samples.push(vec![z.to_string(), v.to_string()]);
    }
    let report = ExtremalPolyReport {
        command: "extremal-poly",
        seed: ctx.seed,
        class: spec,
        alpha: data.alpha.clone(),
        beta: data.beta.clone(),
        a: data.a.clone(),
        b: data.b.clone(),
        f_omega: data.f_omega.clone(),
        f_zero: data.f_zero.clone(),
        f_lin: data.f_lin.clone(),
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec!["command: extremal-poly".to_string()];
            lines.extend(class_lines(&report.class));
            lines.push(format!("alpha: {} {} {}", report.alpha[0], report.alpha[1], report.alpha[2]));
            lines.push(format!("beta: {} {}", report.beta[0], report.beta[1]));
            lines.push(format!("a: {}", report.a));
            lines.push(format!("b: {}", report.b));
            lines.push(format!("f_omega: {}", poly_text(&report.f_omega)));
            lines.push(format!("f_zero: {}", poly_text(&report.f_zero)));
            lines.push(format!("f_lin: {}", poly_text(&report.f_lin)));
            lines.join("\n")
        }
        OutputFormat::Csv => csv_string(&samples)?,
    };
    Ok(Output {
        stdout,
        plots: vec![("f_omega_samples.csv".to_string(), samples)],
    })
}

pub fn threshold_cmd(
    args: &ThresholdArgs,
    file: &FileConfig,
    ctx: &Ctx,
) -> Result<Output, CliError> {
    let factors = resolve_factors(&args.factors, file)?;
    let width = default_width(args.width.clone(), file);
    let threshold = min_positive_angle(&factors, &width)?;
    let text_value = match &threshold {
        AngleThreshold::NoThreshold => "none".to_string(),
        AngleThreshold::Threshold(i) => interval_text(i),
    };
    let report = ThresholdReport {
        command: "threshold",
        seed: ctx.seed,
        factors,
        width,
        threshold,
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec!["command: threshold".to_string()];
            for (i, f) in report.factors.iter().enumerate() {
                lines.push(format!("factor {i}: d={} s={} x={}", f.d, f.s, f.x));
            }
            lines.push(format!("width: {}", report.width));
            lines.push(format!("threshold: {text_value}"));
            lines.join("\n")
        }
        OutputFormat::Csv => kv_csv(&[
            ("width", report.width.to_string()),
            ("threshold", text_value.clone()),
        ])?,
    };
    Ok(Output {
        stdout,
        plots: vec![],
    })
}

pub fn split_cmd(args: &ClassArgs, file: &FileConfig, ctx: &Ctx) -> Result<Output, CliError> {
    let (spec, class) = resolve_class(args, file)?;
    let split = classify::split(&class)?;
    let report = SplitCmdReport {
        command: "split",
        seed: ctx.seed,
        class: spec,
        split,
    };
    let table = {
        let mut rows = vec![vec![
            "part".to_string(),
            "span_lo".to_string(),
            "span_hi".to_string(),
            "positive".to_string(),
            "left".to_string(),
            "right".to_string(),
        ]];
        for (i, p) in report.split.parts.iter().enumerate() {
            rows.push(vec![
                i.to_string(),
                p.span.lo().to_string(),
                p.span.hi().to_string(),
                p.positive.to_string(),
                label_text(&p.left),
                label_text(&p.right),
            ]);
        }
        rows
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec!["command: split".to_string()];
            lines.extend(class_lines(&report.class));
            lines.push(format!("regime: {}", regime_text(report.split.regime)));
            for (i, r) in report.split.roots.iter().enumerate() {
                lines.push(format!(
                    "root {i}: {} multiplicity={}",
                    interval_text(r.interval()),
                    r.multiplicity()
                ));
            }
            for (i, p) in report.split.parts.iter().enumerate() {
                lines.push(format!(
                    "part {i}: span={} positive={} left={} right={}",
                    interval_text(&p.span),
                    p.positive,
                    label_text(&p.left),
                    label_text(&p.right)
                ));
            }
            lines.join("\n")
        }
        OutputFormat::Csv => csv_string(&table)?,
    };
    Ok(Output {
        stdout,
        plots: vec![],
    })
}

pub fn delta_cmd(args: &ClassArgs, file: &FileConfig, ctx: &Ctx) -> Result<Output, CliError> {
    let (spec, class) = resolve_class(args, file)?;
    let delta = classify::properness_delta(&class)?;
    let report = DeltaReport {
        command: "delta",
        seed: ctx.seed,
        class: spec,
        regime: Regime::ExistsExtremal,
        delta,
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec!["command: delta".to_string()];
            lines.extend(class_lines(&report.class));
            lines.push(format!("regime: {}", regime_text(report.regime)));
            lines.push(format!("delta: {}", report.delta));
            lines.join("\n")
        }
        OutputFormat::Csv => kv_csv(&[("delta", report.delta.to_string())])?,
    };
    Ok(Output {
        stdout,
        plots: vec![],
    })
}

/// The bounded-not-proper fixture the breaker and calabi demos run on:
/// synthetic profiles cannot come from config files, so the binary pins one.
fn double_root_fixture() -> Result<MomentumProfile, CliError> {
    let p_c = RatPoly::from_coeffs(vec![Rat::one()]);
    let f = RatPoly::from_coeffs(vec![
        Rat::zero(),
        Rat::zero(),
        Rat::one(),
        Rat::zero(),
        Rat::from_int(-1),
    ]);
    Ok(MomentumProfile::new(p_c, f, Rat::one())?)
}

const FIXTURE_DESC: &str = "F(z) = z^2 (1 - z^2), p_c = 1, kappa = 1";

/// Smallest power of two `k` whose bump support `(z0 - 1/k, z0 + 1/k)` stays
/// inside `(-1, 1)`.
fn first_fitting_index(z0: f64) -> Result<u32, CliError> {
    let room = 1.0 - z0.abs();
    if room <= 0.0 {
        return Err(CliError::Input(format!(
            "center {z0} is outside the open interval (-1, 1)"
        )));
    }
    let mut k = 1u32;
    while 1.0 / f64::from(k) >= room {
        k = k
            .checked_mul(2)
            .ok_or_else(|| CliError::Input("center is too close to the boundary".into()))?;
    }
    Ok(k.max(2))
}

fn demo_steps(args: &EnergyDemoArgs, file: &FileConfig) -> Result<u32, CliError> {
    let steps = args.steps.or(file.steps).unwrap_or(8);
    if !(1..=24).contains(&steps) {
        return Err(CliError::Input(format!(
            "steps = {steps} must be between 1 and 24"
        )));
    }
    Ok(steps)
}

pub fn energy_demo_cmd(
    args: &EnergyDemoArgs,
    file: &FileConfig,
    ctx: &Ctx,
) -> Result<Output, CliError> {
    let demo = match (args.demo, file.demo.as_deref()) {
        (Some(d), _) => d,
        (None, Some(name)) => <DemoKind as clap::ValueEnum>::from_str(name, true)
            .map_err(|e| CliError::Input(format!("demo: {e}")))?,
        (None, None) => {
            return Err(CliError::Input(
                "no demo given: pass --demo growth|breaker|calabi|unbounded".into(),
            ))
        }
    };
    let steps = demo_steps(args, file)?;
    let horner = |c: &[f64], z: f64| c.iter().rev().fold(0.0, |acc, &a| acc * z + a);

    let (report, rows_header) = match demo {
        DemoKind::Growth => {
            let (spec, class) = resolve_class(&args.class, file)?;
            let regime = classify::classify(&class)?;
            if regime != Regime::ExistsExtremal {
                return Err(CliError::Input(format!(
                    "the growth demo needs the ExistsExtremal regime, but the class is {}",
                    regime_text(regime)
                )));
            }
            let center = args
                .center
                .clone()
                .or_else(|| file.center.clone())
                .unwrap_or_else(Rat::zero);
            if center.abs() >= Rat::one() {
                return Err(CliError::Input(format!(
                    "center = {center} must lie strictly between -1 and 1"
                )));
            }
            let data = extremal_polynomial(&class)?;
            let fc = data.f_omega.coeffs_f64();
            let c0 = center.to_f64();
            let mut k = first_fitting_index(c0)?;
            let mut rows = Vec::new();
            for _ in 0..steps {
                let bump = ConvexBump::new(c0, k)?;
                let (lo, hi) = bump.support();
                let value =
                    f64::from(k) * integrate(|z| horner(&fc, z) * bump.h(z), lo, hi, &ctx.quad)?;
                rows.push(DemoRow {
                    index: k,
                    value: value.into(),
                    integral: None,
                });
                k = k.saturating_mul(2);
            }
            (
                EnergyDemoReport {
                    command: "energy-demo",
                    seed: ctx.seed,
                    demo: "growth",
                    class: Some(spec),
                    fixture: None,
                    center: Some(center),
                    amplitude: None,
                    linear_term: None,
                    rows,
                },
                vec!["index".to_string(), "value".to_string()],
            )
        }
        DemoKind::Breaker => {
            let profile = double_root_fixture()?;
            let mut rows = Vec::new();
            let mut k = 2u32;
            for _ in 0..steps {
                let sample = properness_breaker_profile(&profile, k)?;
                rows.push(DemoRow {
                    index: k,
                    value: sample.l_value.into(),
                    integral: Some(sample.integral.into()),
                });
                k = k.saturating_mul(2);
            }
            (
                EnergyDemoReport {
                    command: "energy-demo",
                    seed: ctx.seed,
                    demo: "breaker",
                    class: None,
                    fixture: Some(FIXTURE_DESC.to_string()),
                    center: None,
                    amplitude: None,
                    linear_term: None,
                    rows,
                },
                vec![
                    "index".to_string(),
                    "l_value".to_string(),
                    "integral".to_string(),
                ],
            )
        }
        DemoKind::Calabi => {
            let profile = double_root_fixture()?;
            let mut rows = Vec::new();
            let mut n = 2u32;
            for _ in 0..steps {
                let value = calabi_minimizing_sequence_profile(&profile, n)?;
                rows.push(DemoRow {
                    index: n,
                    value: value.into(),
                    integral: None,
                });
                n = n.saturating_mul(2);
            }
            (
                EnergyDemoReport {
                    command: "energy-demo",
                    seed: ctx.seed,
                    demo: "calabi",
                    class: None,
                    fixture: Some(FIXTURE_DESC.to_string()),
                    center: None,
                    amplitude: None,
                    linear_term: None,
                    rows,
                },
                vec!["index".to_string(), "value".to_string()],
            )
        }
        DemoKind::Unbounded => {
            let (spec, class) = resolve_class(&args.class, file)?;
            let amplitude = args
                .amplitude
                .clone()
                .or_else(|| file.amplitude.clone())
                .unwrap_or_else(|| Rat::from_int(256));
            let profile = MomentumProfile::from_class(&class)?;
            let dir = unbounded_direction_profile(&profile, &amplitude)?;
            let mut rows = Vec::new();
            let mut k = 1u32;
            for _ in 0..steps {
                let value = k_energy_along(&profile, &dir, f64::from(k), &ctx.quad)?;
                rows.push(DemoRow {
                    index: k,
                    value: value.into(),
                    integral: None,
                });
                k = k.saturating_mul(2);
            }
            (
                EnergyDemoReport {
                    command: "energy-demo",
                    seed: ctx.seed,
                    demo: "unbounded",
                    class: Some(spec),
                    fixture: None,
                    center: Some(dir.center.clone()),
                    amplitude: Some(amplitude),
                    linear_term: Some(dir.linear_term.into()),
                    rows,
                },
                vec!["index".to_string(), "value".to_string()],
            )
        }
    };

    let mut table = vec![rows_header];
    for r in &report.rows {
        let mut row = vec![r.index.to_string(), r.value.value.to_string()];
        if let Some(i) = &r.integral {
            row.push(i.value.to_string());
        }
        table.push(row);
    }
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec![
                "command: energy-demo".to_string(),
                format!("demo: {}", report.demo),
            ];
            if let Some(c) = &report.class {
                lines.extend(class_lines(c));
            }
            if let Some(f) = &report.fixture {
                lines.push(format!("fixture: {f}"));
            }
            if let Some(c) = &report.center {
                lines.push(format!("center: {c}"));
            }
            if let Some(a) = &report.amplitude {
                lines.push(format!("amplitude: {a}"));
            }
            if let Some(l) = &report.linear_term {
                lines.push(format!("linear_term: {}", l.value));
            }
            for r in &report.rows {
                match &r.integral {
                    Some(i) => lines.push(format!(
                        "index={} value={} integral={}",
                        r.index, r.value.value, i.value
                    )),
                    None => lines.push(format!("index={} value={}", r.index, r.value.value)),
                }
            }
            lines.join("\n")
        }
        OutputFormat::Csv => csv_string(&table)?,
    };
    let plot_name = format!("energy_demo_{}.csv", report.demo);
    Ok(Output {
        stdout,
        plots: vec![(plot_name, table)],
    })
}

pub fn tf_sweep_cmd(args: &TfSweepArgs, file: &FileConfig, ctx: &Ctx) -> Result<Output, CliError> {
    let s = args
        .s
        .clone()
        .or_else(|| file.s.clone())
        .ok_or_else(|| CliError::Input("tf-sweep needs --s (negative rational)".into()))?;
    let grid = args.grid.or(file.grid).unwrap_or(32);
    if !(1..=100_000).contains(&grid) {
        return Err(CliError::Input(format!(
            "grid = {grid} must be between 1 and 100000"
        )));
    }
    let width = default_width(args.width.clone(), file);
    let xs_enclosure = tf_find_xs(&s, &width)?;
    let delta_poly = tf_delta_poly(&s);
    let refine = rat(1, 1 << 20);
    let mut rows = Vec::with_capacity(grid);
    for i in 1..=grid {
        let x = Rat::new(i as i64, grid as i64 + 1);
        let delta = delta_poly.eval(&x);
        let class = AdmissibleClass::new(
            vec![BaseFactor {
                d: 1,
                s: s.clone(),
                x: x.clone(),
            }],
            Rat::one(),
        )?;
        let regime = classify::classify(&class)?;
        let case = if xs_enclosure.contains(&x) || delta.is_zero() {
            TfCase::NearCritical
        } else if delta.is_negative() {
            TfCase::BelowCritical
        } else {
            TfCase::AboveCritical
        };
        let roots = if case == TfCase::AboveCritical {
            let data = extremal_polynomial(&class)?;
            let mut rs = isolate_roots(&data.f_omega, &Rat::from_int(-1), &Rat::one())?;
            for r in &mut rs {
                r.refine_to(&refine);
            }
            rs.iter().map(|r| r.interval().clone()).collect()
        } else {
            Vec::new()
        };
        rows.push(SweepRow {
            x,
            delta,
            case,
            regime,
            roots,
        });
    }
    let report = TfSweepReport {
        command: "tf-sweep",
        seed: ctx.seed,
        s,
        grid,
        width,
        xs_enclosure,
        rows,
    };
    let mut table = vec![vec![
        "x".to_string(),
        "delta".to_string(),
        "case".to_string(),
        "regime".to_string(),
        "roots".to_string(),
    ]];
    for r in &report.rows {
        let roots = r
            .roots
            .iter()
            .map(|i| format!("{}..{}", i.lo(), i.hi()))
            .collect::<Vec<_>>()
            .join(";");
        table.push(vec![
            r.x.to_string(),
            r.delta.to_string(),
            case_text(r.case).to_string(),
            regime_text(r.regime).to_string(),
            roots,
        ]);
    }
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => {
            let mut lines = vec![
                "command: tf-sweep".to_string(),
                format!("s: {}", report.s),
                format!("xs_enclosure: {}", interval_text(&report.xs_enclosure)),
            ];
            for r in &report.rows {
                lines.push(format!(
                    "x={} delta={} case={} regime={}",
                    r.x,
                    r.delta,
                    case_text(r.case),
                    regime_text(r.regime)
                ));
            }
            lines.join("\n")
        }
        OutputFormat::Csv => csv_string(&table)?,
    };
    Ok(Output {
        stdout,
        plots: vec![("tf_sweep.csv".to_string(), table)],
    })
}

pub fn tf_xs_cmd(args: &TfXsArgs, file: &FileConfig, ctx: &Ctx) -> Result<Output, CliError> {
    let s = args
        .s
        .clone()
        .or_else(|| file.s.clone())
        .ok_or_else(|| CliError::Input("tf-xs needs --s (negative rational)".into()))?;
    let width = default_width(args.width.clone(), file);
    let enclosure = tf_find_xs(&s, &width)?;
    let report = TfXsReport {
        command: "tf-xs",
        seed: ctx.seed,
        s,
        width,
        enclosure,
    };
    let stdout = match ctx.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Text => [
            "command: tf-xs".to_string(),
            format!("s: {}", report.s),
            format!("width: {}", report.width),
            format!("enclosure: {}", interval_text(&report.enclosure)),
        ]
        .join("\n"),
        OutputFormat::Csv => kv_csv(&[
            ("s", report.s.to_string()),
            ("width", report.width.to_string()),
            ("enclosure_lo", report.enclosure.lo().to_string()),
            ("enclosure_hi", report.enclosure.hi().to_string()),
        ])?,
    };
    Ok(Output {
        stdout,
        plots: vec![],
    })
}
