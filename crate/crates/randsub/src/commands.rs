//! One function per subcommand, each producing an [`Output`].

use rayon::prelude::*;
use serde_json::{json, Value};

use randsub_core::simulate::{self, empirical_stats, Preset, SimulationMode};
use randsub_core::{dist, entropy, extrema, moments, CountDistribution, RuleParams, SupportCap};

use crate::cli::{DistArgs, ExtremaArgs, GridArgs, Mode, SimulateArgs};
use crate::config::IRange;
use crate::ensemble::parallel_ensemble;
use crate::error::CliError;
use crate::table::{Cell, Output, Table};

type Result<T> = std::result::Result<T, CliError>;

pub const DEFAULT_GRID: &str = "0:1:0.01";

fn params_for(k: u32, grid: &[f64]) -> Result<Vec<RuleParams>> {
    grid.iter()
        .map(|&p| RuleParams::new(k, p).map_err(CliError::from))
        .collect()
}

/// Distribution at every iteration of `range` for one parameter set.
fn chain(range: IRange, params: RuleParams, cap: SupportCap) -> Result<Vec<CountDistribution>> {
    let mut out = Vec::new();
    if range.first == 0 {
        out.push(CountDistribution::seed(params.k()));
    }
    let all = dist::distribution_chain(range.last, params, cap)?;
    out.extend(all.into_iter().skip(range.first.saturating_sub(1) as usize));
    Ok(out)
}

pub fn dist(args: &DistArgs, cap: SupportCap) -> Result<Output> {
    let range = args.iterations.range(None).map_err(CliError::Usage)?;
    let grid = args.probability.grid(None).map_err(CliError::Usage)?;
    let params = params_for(args.k, grid.points())?;
    cap.support_len(args.k, range.last)?;
    let chains = params
        .par_iter()
        .map(|&pr| chain(range, pr, cap))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&["iteration", "k", "p", "x", "prob"]);
    for (offset, i) in range.iter().enumerate() {
        for (pr, ch) in params.iter().zip(&chains) {
            for (x, &w) in ch[offset].probs().iter().enumerate() {
                table.push(vec![
                    i.into(),
                    args.k.into(),
                    pr.p().into(),
                    x.into(),
                    w.into(),
                ]);
            }
        }
    }
    Ok(Output::new(table))
}

pub fn moments(args: &GridArgs) -> Result<Output> {
    let range = args
        .iterations
        .range(Some(IRange::single(10)))
        .map_err(CliError::Usage)?;
    let grid = args
        .probability
        .grid(Some(DEFAULT_GRID))
        .map_err(CliError::Usage)?;
    let params = params_for(args.k, grid.points())?;

    let mut table = Table::new(&[
        "k",
        "i",
        "p",
        "mean",
        "var",
        "sigma",
        "dispersion",
        "zeros_mean",
        "ratio",
    ]);
    for i in range.iter() {
        for &pr in &params {
            let m = moments::summary(i, pr);
            table.push(vec![
                args.k.into(),
                i.into(),
                pr.p().into(),
                m.mean.into(),
                m.variance.into(),
                m.std_dev.into(),
                m.dispersion.into(),
                m.zeros_mean.into(),
                m.ones_zeros_ratio.into(),
            ]);
        }
    }
    Ok(Output::new(table))
}

pub fn entropy(args: &GridArgs, cap: SupportCap) -> Result<Output> {
    let range = args
        .iterations
        .range(Some(IRange { first: 1, last: 10 }))
        .map_err(CliError::Usage)?;
    let grid = args
        .probability
        .grid(Some(DEFAULT_GRID))
        .map_err(CliError::Usage)?;
    let params = params_for(args.k, grid.points())?;
    cap.support_len(args.k, range.last)?;
    // h_i needs one more iteration; it is left empty when that would exceed
    // the cap.
    let depth = if cap.support_len(args.k, range.last + 1).is_ok() {
        range.last + 1
    } else {
        range.last
    };
    let series = params
        .par_iter()
        .map(|&pr| -> Result<Vec<f64>> {
            let mut h = vec![0.0];
            h.extend(entropy::mean_entropy_series(depth, pr, cap)?);
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&["k", "i", "p", "H_i", "h_i", "H_per_digit"]);
    for i in range.iter() {
        for (pr, h) in params.iter().zip(&series) {
            let idx = i as usize;
            let len = (args.k as f64).powi(i as i32);
            table.push(vec![
                args.k.into(),
                i.into(),
                pr.p().into(),
                h[idx].into(),
                h.get(idx + 1).map(|next| next - h[idx]).into(),
                (h[idx] / len).into(),
            ]);
        }
    }
    Ok(Output::new(table))
}

pub fn hvar(args: &GridArgs, cap: SupportCap) -> Result<Output> {
    let range = args
        .iterations
        .range(Some(IRange { first: 1, last: 10 }))
        .map_err(CliError::Usage)?;
    let grid = args
        .probability
        .grid(Some(DEFAULT_GRID))
        .map_err(CliError::Usage)?;
    cap.support_len(args.k, range.last)?;
    let curves = range
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| -> Result<_> {
            let curve = entropy::hvar_curve_with_cap(i, args.k, grid.points(), cap)?;
            let at = RuleParams::new(args.k, curve.p_r)?;
            let extreme = entropy::HVarPoint {
                p: curve.p_r,
                variance: moments::variance(i, at),
                entropy: entropy::mean_entropy_with_cap(i, at, cap)?,
            };
            Ok((curve, extreme))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&["k", "i", "p", "var", "H", "is_p_r"]);
    let mut locus = Vec::new();
    for (curve, extreme) in &curves {
        let row = |pt: &entropy::HVarPoint, flag: bool| -> Vec<Cell> {
            vec![
                args.k.into(),
                curve.iteration.into(),
                pt.p.into(),
                pt.variance.into(),
                pt.entropy.into(),
                flag.into(),
            ]
        };
        let on_grid = curve.points.iter().any(|pt| pt.p == extreme.p);
        let mut pending = !on_grid;
        for pt in &curve.points {
            if pending && extreme.p < pt.p {
                table.push(row(extreme, true));
                pending = false;
            }
            table.push(row(pt, pt.p == extreme.p));
        }
        if pending {
            table.push(row(extreme, true));
        }
        locus.push(json!({
            "i": curve.iteration,
            "p_r": extreme.p,
            "var": extreme.variance,
            "H": extreme.entropy,
        }));
    }
    let mut out = Output::new(table);
    out.extra.insert("p_r".into(), Value::Array(locus));
    Ok(out)
}

pub fn extrema(args: &ExtremaArgs) -> Result<Output> {
    if args.k.is_empty() {
        return Err(CliError::Usage("no substitution length given".into()));
    }
    let range = args.i_range;
    let fits = args
        .k
        .par_iter()
        .map(|&k| extrema::fit_root_curve(k, range.iter()).map_err(CliError::from))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(&["k", "i", "p_m", "fitted", "alpha", "beta", "rss"]);
    let mut reports = Vec::new();
    for fit in &fits {
        for &(i, pm) in &fit.roots {
            table.push(vec![
                fit.k.into(),
                i.into(),
                pm.into(),
                extrema::root_curve_model(i as f64, fit.alpha, fit.beta).into(),
                fit.alpha.into(),
                fit.beta.into(),
                fit.rss.into(),
            ]);
        }
        reports.push(json!({
            "k": fit.k,
            "i_first": fit.i_range.0,
            "i_last": fit.i_range.1,
            "alpha": fit.alpha,
            "beta": fit.beta,
            "rss": fit.rss,
            "evaluations": fit.evaluations,
            "roots": fit.roots.iter().map(|&(i, pm)| json!({"i": i, "p_m": pm})).collect::<Vec<_>>(),
        }));
    }
    let mut out = Output::new(table);
    out.extra.insert("fits".into(), Value::Array(reports));
    Ok(out)
}

pub fn simulate(args: &SimulateArgs, cap: SupportCap) -> Result<Output> {
    if let Some(name) = &args.preset {
        return simulate_preset(name, args);
    }
    let p = args
        .p
        .ok_or_else(|| CliError::Usage("--p is required unless --preset is given".into()))?;
    let params = RuleParams::new(args.k, p)?;
    let mode = match args.mode {
        Mode::Count => SimulationMode::CountOnly,
        Mode::Full => SimulationMode::FullSequence,
    };
    let hist = parallel_ensemble(params, args.i, args.runs, args.seed, mode)?;
    let exact = dist::distribution_with_cap(args.i, params, cap).ok();
    let runs = hist.runs as f64;

    let mut table = Table::new(&["x", "count", "empirical_prob", "exact_prob"]);
    match &exact {
        Some(d) => {
            for (x, &w) in d.probs().iter().enumerate() {
                let c = hist.counts.get(&(x as u64)).copied().unwrap_or(0);
                table.push(vec![x.into(), c.into(), (c as f64 / runs).into(), w.into()]);
            }
        }
        None => {
            for (&x, &c) in &hist.counts {
                table.push(vec![
                    x.into(),
                    c.into(),
                    (c as f64 / runs).into(),
                    Cell::Empty,
                ]);
            }
        }
    }

    let stats = empirical_stats(&hist).ok();
    let exact_mean_entropy = exact.as_ref().map(entropy::mean_entropy_of);
    let tv = match &exact {
        Some(d) => Some(hist.tv_distance(d)?),
        None => None,
    };
    let mut out = Output::new(table);
    out.summary = vec![
        ("k", args.k.into()),
        ("i", args.i.into()),
        ("p", p.into()),
        ("runs", hist.runs.into()),
        ("seed", hist.seed.into()),
        ("empirical_mean", stats.map(|s| s.mean).into()),
        ("exact_mean", moments::mean(args.i, params).into()),
        ("empirical_var", stats.map(|s| s.variance).into()),
        ("exact_var", moments::variance(args.i, params).into()),
        ("empirical_entropy", stats.map(|s| s.mean_entropy).into()),
        ("exact_entropy", exact_mean_entropy.into()),
        ("tv_distance", tv.into()),
    ];
    Ok(out)
}

fn simulate_preset(name: &str, args: &SimulateArgs) -> Result<Output> {
    let preset: Preset = name.parse()?;
    let seed_symbol = args.seed_symbol.unwrap_or(preset.seed_symbol());
    let seq = simulate::iterate_sequence(&preset.rule(), seed_symbol, args.i, args.seed)?;
    let ones = seq.iter().filter(|&&b| b == 1).count();
    let mut table = Table::new(&["preset", "seed_symbol", "i", "length", "ones", "sequence"]);
    table.push(vec![
        preset.to_string().into(),
        u32::from(seed_symbol).into(),
        args.i.into(),
        seq.len().into(),
        ones.into(),
        simulate::format_sequence(&seq).into(),
    ]);
    Ok(Output::new(table))
}
