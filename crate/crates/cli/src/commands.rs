use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use distwarm::distributions::characteristic_series;
use distwarm::ingest::{assemble, parse_station_file, write_rejects, AssembledPanel, ParseOutcome};
use distwarm::report::{write_dominance, write_table, Heatmap, Table};
use distwarm::sim::{
    standard_suite, write_rate_checks, RateCheck, SuiteSelector, STANDARD_LENGTHS,
};
use distwarm::warming::{dominance_test, run_pipeline, Period, QuantileSeries, Region};
use distwarm::{Error as CoreError, Report64};
use log::info;
use serde::Deserialize;

use crate::config::{Dataset, RunConfig};
use crate::Failure;

const DELIMITER: u8 = b',';

/// Core errors on loaded data are data errors, except the ones that blame
/// the run configuration.
fn core(e: CoreError) -> Failure {
    match e {
        CoreError::InvalidPanel(_) | CoreError::InvalidArgument(_) => Failure::Config(e.into()),
        _ => Failure::Data(e.into()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .map_err(Failure::Output)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(Failure::Output)
}

fn finish<W: Write>(mut w: W, path: &Path) -> Result<(), Failure> {
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Output)
}

fn write_with<F>(path: &Path, f: F) -> Result<(), Failure>
where
    F: FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>,
{
    let mut w = create(path)?;
    f(&mut w)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Output)?;
    finish(w, path)
}

struct Loaded {
    parsed: ParseOutcome,
    panel: AssembledPanel,
}

fn load(ds: &Dataset) -> Result<Loaded, Failure> {
    let spec = ds.panel.as_ref().ok_or_else(|| {
        Failure::Config(anyhow!(
            "dataset `{}` has no panel years; add a [panel] section",
            ds.name
        ))
    })?;
    let parsed = parse_station_file(&ds.path, &ds.format).map_err(core)?;
    let panel = assemble(&parsed, ds.format.resolution, spec)
        .map_err(|e| core(e).context(format!("dataset `{}`", ds.name)))?;
    let acc = panel.accounting;
    info!(
        "{}: {} rows, {} used, {} filtered, {} rejected; {} stations, {} years",
        ds.name,
        acc.total,
        acc.used,
        acc.filtered,
        acc.rejected,
        panel.stations.len(),
        panel.samples.len()
    );
    Ok(Loaded { parsed, panel })
}

pub fn ingest(config: &RunConfig) -> Result<(), Failure> {
    if config.datasets.is_empty() {
        return Err(Failure::Config(anyhow!("no [[datasets]] in the config")));
    }
    for ds in &config.datasets {
        let Loaded { parsed, panel } = load(ds)?;
        let set = characteristic_series(&panel.samples).map_err(core)?;
        let dir = config.out.join(&ds.name);
        write_with(&dir.join("characteristics.csv"), |w| {
            Ok(set.write_matrix(w)?)
        })?;
        write_with(&dir.join("rejects.csv"), |w| {
            Ok(write_rejects(&parsed.rejects, w)?)
        })?;
        write_with(&dir.join("samples.csv"), |w| {
            writeln!(w, "year,value")?;
            for s in &panel.samples {
                for v in s.values() {
                    writeln!(w, "{},{v}", s.year())?;
                }
            }
            Ok(())
        })?;
        let acc = panel.accounting;
        println!(
            "{}: {} years, {} stations, {} of {} rows rejected -> {}",
            ds.name,
            panel.samples.len(),
            panel.stations.len(),
            acc.rejected,
            acc.total,
            dir.display()
        );
    }
    Ok(())
}

fn report_path(out: &Path) -> PathBuf {
    out.join("report.json")
}

pub fn analyze(config: &RunConfig) -> Result<(), Failure> {
    let primaries: Vec<&Dataset> = config.primaries().collect();
    if primaries.is_empty() {
        return Err(Failure::Config(anyhow!("no primary dataset in the config")));
    }
    let reference = config
        .reference()
        .map(|ds| load(ds).map(|l| (ds.name.as_str(), l.panel.samples)))
        .transpose()?;
    let mut reports: Vec<Report64> = Vec::new();
    for ds in primaries {
        let samples = load(ds)?.panel.samples;
        let region = Region {
            name: &ds.name,
            samples: &samples,
        };
        let reference = reference
            .as_ref()
            .map(|(name, s)| Region { name, samples: s });
        let report = run_pipeline(region, reference, &config.pipeline)
            .map_err(|e| core(e).context(format!("dataset `{}`", ds.name)))?;
        reports.push(report);
    }

    let out = &config.out;
    write_with(&report_path(out), |w| {
        serde_json::to_writer_pretty(&mut *w, &reports)?;
        writeln!(w)?;
        Ok(())
    })?;
    let refs: Vec<&Report64> = reports.iter().collect();
    for table in Table::ALL {
        let path = out.join(format!("{}.csv", table.name()));
        write_with(&path, |w| Ok(write_table(&refs, table, DELIMITER, w)?))?;
    }
    let mut periods: Vec<Period> = reports
        .iter()
        .flat_map(|r| r.periods.iter().map(|p| p.period))
        .collect();
    periods.sort();
    periods.dedup();
    for period in periods {
        let sliced: Vec<Report64> = reports
            .iter()
            .map(|r| Report64 {
                periods: r
                    .periods
                    .iter()
                    .filter(|p| p.period == period)
                    .cloned()
                    .collect(),
                ..r.clone()
            })
            .collect();
        let refs: Vec<&Report64> = sliced.iter().collect();
        let path = out.join(format!("cotrend_{period}.csv"));
        write_with(&path, |w| {
            Ok(write_table(&refs, Table::Cotrend, DELIMITER, w)?)
        })?;
    }
    for r in &reports {
        for p in &r.periods {
            let dom = p
                .dominance
                .as_ref()
                .map(|d| {
                    format!(
                        ", {} vs {}: {}",
                        r.region,
                        r.reference.as_deref().unwrap_or(""),
                        d.verdict.as_str()
                    )
                })
                .unwrap_or_default();
            let low = if p.typology.low_confidence {
                " (low confidence)"
            } else {
                ""
            };
            println!("{} {}: {}{low}{dom}", r.region, p.period, p.typology.label);
        }
    }
    println!("results written to {}", out.display());
    Ok(())
}

pub fn compare(config: &RunConfig, a: Option<&str>, b: Option<&str>) -> Result<(), Failure> {
    let pick_a = match a {
        Some(name) => config.dataset(name).map_err(Failure::Config)?,
        None => config
            .primaries()
            .next()
            .ok_or_else(|| Failure::Config(anyhow!("no primary dataset to compare")))?,
    };
    let pick_b = match b {
        Some(name) => config.dataset(name).map_err(Failure::Config)?,
        None => config
            .reference()
            .or_else(|| config.primaries().find(|d| d.name != pick_a.name))
            .ok_or_else(|| Failure::Config(anyhow!("compare needs a second dataset")))?,
    };
    if pick_a.name == pick_b.name {
        return Err(Failure::Config(anyhow!(
            "cannot compare `{}` with itself",
            pick_a.name
        )));
    }
    let sa = load(pick_a)?.panel.samples;
    let sb = load(pick_b)?.panel.samples;
    let taus = &config.pipeline.taus;
    let qa = QuantileSeries::from_samples(&sa, taus).map_err(core)?;
    let qb = QuantileSeries::from_samples(&sb, taus).map_err(core)?;
    let span = |s: &[distwarm::AnnualSample<f64>]| (s[0].year(), s[s.len() - 1].year());
    let ((a0, a1), (b0, b1)) = (span(&sa), span(&sb));
    let periods = if config.pipeline.periods.is_empty() {
        vec![Period::new(a0.max(b0), a1.min(b1))
            .map_err(|e| Failure::Config(anyhow!(e).context("the two datasets share no years")))?]
    } else {
        config.pipeline.periods.clone()
    };
    let level = config.pipeline.level;
    let mut results = Vec::new();
    for p in periods {
        if p.start < a0.max(b0) || p.end > a1.min(b1) {
            return Err(Failure::Config(anyhow!(
                "period {p} outside the common years {}-{}",
                a0.max(b0),
                a1.min(b1)
            )));
        }
        let d = dominance_test(
            &qa.window(p.start, p.end),
            &qb.window(p.start, p.end),
            level,
            config.pipeline.bandwidth,
        )
        .map_err(core)?;
        println!(
            "{} vs {} {p}: {}",
            pick_a.name,
            pick_b.name,
            d.verdict.as_str()
        );
        results.push((p, d));
    }
    let path = config
        .out
        .join(format!("dominance_{}_vs_{}.csv", pick_a.name, pick_b.name));
    write_with(&path, |w| {
        Ok(write_dominance(
            &pick_a.name,
            &pick_b.name,
            &results,
            DELIMITER,
            w,
        )?)
    })
}

pub fn simulate(config: &RunConfig, suite: SuiteSelector) -> Result<(), Failure> {
    let mut check = RateCheck::new(STANDARD_LENGTHS.to_vec(), config.reps);
    check.tolerance = config.tolerance;
    let results = standard_suite(suite, config.seed, &check).map_err(core)?;
    let path = config.out.join("rate_checks.csv");
    write_with(&path, |w| Ok(write_rate_checks(&results, w)?))?;
    let mut failed = Vec::new();
    for r in &results {
        let status = if r.pass { "pass" } else { "FAIL" };
        println!(
            "{status} {} {}: exponent {:.3}, target {} ± {}",
            r.statistic, r.dgp, r.exponent, r.target, r.tolerance
        );
        if !r.pass {
            failed.push(format!("{} {}", r.statistic, r.dgp));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "rate checks failed: {}",
            failed.join(", ")
        )))
    }
}

/// The parts of a saved report the exports need; non-finite numbers are
/// stored as `null` in JSON.
#[derive(Debug, Deserialize)]
struct SavedReport {
    region: String,
    periods: Vec<SavedPeriod>,
}

#[derive(Debug, Deserialize)]
struct SavedPeriod {
    period: Period,
    trends: Vec<SavedTrend>,
}

#[derive(Debug, Deserialize)]
struct SavedTrend {
    name: String,
    trend: SavedSlope,
}

#[derive(Debug, Deserialize)]
struct SavedSlope {
    beta: Option<f64>,
    p_two_sided: Option<f64>,
}

fn heatmap(saved: &[SavedReport]) -> Heatmap<f64> {
    let rows: Vec<String> = distwarm::CharacteristicId::ALL
        .iter()
        .map(|c| c.name().to_owned())
        .collect();
    let mut h = Heatmap {
        cells: vec![Vec::new(); rows.len()],
        p_values: vec![Vec::new(); rows.len()],
        columns: Vec::new(),
        rows,
    };
    for r in saved {
        for p in &r.periods {
            h.columns.push(format!("{}:{}", r.region, p.period));
            for (i, name) in h.rows.iter().enumerate() {
                let t = p.trends.iter().find(|t| &t.name == name).map(|t| &t.trend);
                h.cells[i].push(t.and_then(|t| t.beta).unwrap_or(f64::NAN));
                h.p_values[i].push(t.and_then(|t| t.p_two_sided).unwrap_or(f64::NAN));
            }
        }
    }
    h
}

pub fn report(config: &RunConfig) -> Result<(), Failure> {
    let path = report_path(&config.out);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Failure::Config(anyhow!(
                "{} not found; run `distwarm analyze` with the same --out first",
                path.display()
            )))
        }
        Err(e) => {
            return Err(Failure::Data(
                anyhow!(e).context(format!("cannot read {}", path.display())),
            ))
        }
    };
    let saved: Vec<SavedReport> = serde_json::from_str(&text)
        .with_context(|| format!("{} is not an analyze report", path.display()))
        .map_err(Failure::Data)?;
    let h = heatmap(&saved);
    let heat = config.out.join("heatmap.csv");
    write_with(&heat, |w| Ok(h.write(DELIMITER, w)?))?;
    let bars = config.out.join("bars.csv");
    write_with(&bars, |w| Ok(h.write_bars(DELIMITER, w)?))?;
    println!(
        "{} columns exported to {} and {}",
        h.columns.len(),
        heat.display(),
        bars.display()
    );
    Ok(())
}
