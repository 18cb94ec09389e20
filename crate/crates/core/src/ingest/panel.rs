use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;

use super::{
    days_in_month, days_in_year, AnnualSample, PanelMode, PanelRule, PanelSpec, ParseOutcome,
    Resolution, StationMonthUnit, StationRecord,
};
use crate::error::{Error, Result};

type UnitKey = (String, i32, u32);

/// A station-month that failed the coverage rule.
#[derive(Debug, Clone, PartialEq)]
pub struct OmittedMonth {
    pub station_id: String,
    pub year: i32,
    pub month: u32,
    pub days_present: u32,
    pub days_in_month: u32,
}

#[derive(Debug, Clone, Default)]
pub struct MonthlyUnits {
    /// Sorted by station, year, month.
    pub units: Vec<StationMonthUnit>,
    pub omitted: Vec<OmittedMonth>,
}

/// Mean of per-day values, each day's duplicates averaged first; summation in
/// sorted order so the result does not depend on input order.
fn mean_of_days(mut obs: Vec<(u32, f64)>) -> (u32, f64) {
    obs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut day_means = Vec::new();
    let mut i = 0;
    while i < obs.len() {
        let day = obs[i].0;
        let mut j = i;
        let mut acc = 0.0;
        while j < obs.len() && obs[j].0 == day {
            acc += obs[j].1;
            j += 1;
        }
        day_means.push(acc / (j - i) as f64);
        i = j;
    }
    let n = day_means.len();
    (n as u32, day_means.iter().sum::<f64>() / n as f64)
}

/// Reduces daily records to monthly means, keeping months whose fraction of
/// days present reaches `coverage`.
pub fn build_station_month_units(records: &[StationRecord], coverage: f64) -> MonthlyUnits {
    let mut groups: BTreeMap<UnitKey, Vec<(u32, f64)>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.station_id.clone(), r.date.year(), r.date.month()))
            .or_default()
            .push((r.date.day(), r.tavg));
    }
    let mut out = MonthlyUnits::default();
    for ((station_id, year, month), obs) in groups {
        let (days_present, value) = mean_of_days(obs);
        let dim = days_in_month(year, month);
        if (days_present as f64) < coverage * dim as f64 {
            log::debug!("{station_id} {year}-{month:02}: {days_present}/{dim} days, month omitted");
            out.omitted.push(OmittedMonth {
                station_id,
                year,
                month,
                days_present,
                days_in_month: dim,
            });
        } else {
            out.units.push(StationMonthUnit {
                station_id,
                year,
                month,
                value,
            });
        }
    }
    out
}

/// Records that already hold monthly means; duplicates are averaged.
fn monthly_records_as_units(records: &[StationRecord]) -> MonthlyUnits {
    let mut groups: BTreeMap<UnitKey, Vec<(u32, f64)>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.station_id.clone(), r.date.year(), r.date.month()))
            .or_default()
            .push((0, r.tavg));
    }
    MonthlyUnits {
        units: groups
            .into_iter()
            .map(|((station_id, year, month), obs)| StationMonthUnit {
                station_id,
                year,
                month,
                value: mean_of_days(obs).1,
            })
            .collect(),
        omitted: Vec::new(),
    }
}

#[derive(Debug, Clone)]
pub struct BalancedPanel {
    pub stations: Vec<String>,
    /// (station, calendar month) pairs contributing to every year.
    pub kept_pairs: Vec<(String, u32)>,
    pub samples: Vec<AnnualSample<f64>>,
}

impl BalancedPanel {
    pub fn units_per_year(&self) -> usize {
        self.kept_pairs.len()
    }
}

/// Keeps the station-month units present throughout the panel period and
/// builds one sample per year from them.
pub fn select_balanced_panel(
    units: &[StationMonthUnit],
    spec: &PanelSpec,
) -> Result<BalancedPanel> {
    spec.validate()?;
    let (lo, hi) = units.iter().fold((i32::MAX, i32::MIN), |(lo, hi), u| {
        (lo.min(u.year), hi.max(u.year))
    });
    if units.is_empty() || lo > spec.start_year || hi < spec.end_year {
        return Err(Error::InvalidPanel(format!(
            "period {}-{} outside data range {}-{}",
            spec.start_year,
            spec.end_year,
            if units.is_empty() { 0 } else { lo },
            if units.is_empty() { 0 } else { hi }
        )));
    }
    let years = (spec.end_year - spec.start_year + 1) as usize;

    // presence[(station, month)] = years with a unit
    let mut presence: BTreeMap<(&str, u32), usize> = BTreeMap::new();
    let mut stations: BTreeSet<&str> = BTreeSet::new();
    for u in units.iter().filter(|u| spec.years().contains(&u.year)) {
        *presence
            .entry((u.station_id.as_str(), u.month))
            .or_default() += 1;
        stations.insert(u.station_id.as_str());
    }
    let complete = |s: &str, m: u32| presence.get(&(s, m)).copied().unwrap_or(0) == years;

    let kept_pairs: Vec<(String, u32)> = match spec.rule {
        PanelRule::Strict => stations
            .iter()
            .filter(|s| (1..=12).all(|m| complete(s, m)))
            .flat_map(|s| (1..=12).map(move |m| (s.to_string(), m)))
            .collect(),
        PanelRule::PerMonth => stations
            .iter()
            .flat_map(|s| (1..=12).map(move |m| (*s, m)))
            .filter(|(s, m)| complete(s, *m))
            .map(|(s, m)| (s.to_string(), m))
            .collect(),
    };

    if kept_pairs.is_empty() {
        let mut missing: Vec<(usize, &str)> = stations
            .iter()
            .map(|s| {
                let have: usize = (1..=12)
                    .map(|m| presence.get(&(*s, m)).copied().unwrap_or(0))
                    .sum();
                (years * 12 - have, *s)
            })
            .collect();
        missing.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        let worst = missing
            .iter()
            .take(5)
            .map(|(k, s)| format!("{s} ({k} of {} units missing)", years * 12))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::EmptyPanel {
            start: spec.start_year,
            end: spec.end_year,
            worst: if worst.is_empty() {
                "no stations in period".into()
            } else {
                worst
            },
        });
    }

    let keep: BTreeSet<(&str, u32)> = kept_pairs.iter().map(|(s, m)| (s.as_str(), *m)).collect();
    let mut by_year: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
    for u in units.iter().filter(|u| spec.years().contains(&u.year)) {
        if keep.contains(&(u.station_id.as_str(), u.month)) {
            by_year.entry(u.year).or_default().push(u.value);
        }
    }
    let samples = by_year
        .into_iter()
        .map(|(year, v)| AnnualSample::new(year, v))
        .collect::<Result<Vec<_>>>()?;
    let station_ids: BTreeSet<&str> = kept_pairs.iter().map(|(s, _)| s.as_str()).collect();
    Ok(BalancedPanel {
        stations: station_ids.into_iter().map(str::to_owned).collect(),
        kept_pairs,
        samples,
    })
}

/// One sample per year from the daily means of a single station.
pub fn assemble_daily_annual_samples(
    records: &[StationRecord],
    spec: &PanelSpec,
) -> Result<Vec<AnnualSample<f64>>> {
    spec.validate()?;
    let ids: BTreeSet<&str> = records.iter().map(|r| r.station_id.as_str()).collect();
    if ids.len() > 1 {
        return Err(Error::InvalidArgument(format!(
            "single-station mode but {} stations in input",
            ids.len()
        )));
    }
    let mut by_year: BTreeMap<i32, Vec<(u32, f64)>> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| spec.years().contains(&r.date.year()))
    {
        by_year
            .entry(r.date.year())
            .or_default()
            .push((r.date.ordinal(), r.tavg));
    }
    let mut samples = Vec::new();
    for (year, mut obs) in by_year {
        obs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut days: Vec<f64> = Vec::with_capacity(366);
        let mut i = 0;
        while i < obs.len() {
            let mut j = i;
            let mut acc = 0.0;
            while j < obs.len() && obs[j].0 == obs[i].0 {
                acc += obs[j].1;
                j += 1;
            }
            days.push(acc / (j - i) as f64);
            i = j;
        }
        let diy = days_in_year(year);
        if (days.len() as f64) < spec.coverage * diy as f64 {
            log::info!("{year}: {}/{diy} days present, year dropped", days.len());
            continue;
        }
        samples.push(AnnualSample::new(year, days)?);
    }
    if samples.is_empty() {
        return Err(Error::InvalidPanel(format!(
            "no year in {}-{} meets the coverage threshold",
            spec.start_year, spec.end_year
        )));
    }
    Ok(samples)
}

/// Row bookkeeping: `used + filtered + rejected == total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RowAccounting {
    pub total: usize,
    pub rejected: usize,
    /// Parsed rows that reached an annual sample.
    pub used: usize,
    /// Parsed rows dropped by period, coverage or panel selection.
    pub filtered: usize,
}

#[derive(Debug, Clone)]
pub struct AssembledPanel {
    pub samples: Vec<AnnualSample<f64>>,
    pub stations: Vec<String>,
    pub omitted_months: Vec<OmittedMonth>,
    pub accounting: RowAccounting,
}

/// Parsed file to annual samples according to `spec.mode`.
pub fn assemble(
    parsed: &ParseOutcome,
    resolution: Resolution,
    spec: &PanelSpec,
) -> Result<AssembledPanel> {
    let records = &parsed.records;
    let (samples, stations, omitted_months, used) = match spec.mode {
        PanelMode::CrossSectionalMonthly => {
            let monthly = match resolution {
                Resolution::Daily => build_station_month_units(records, spec.coverage),
                Resolution::Monthly => monthly_records_as_units(records),
            };
            let panel = select_balanced_panel(&monthly.units, spec)?;
            let keep: BTreeSet<(&str, u32)> = panel
                .kept_pairs
                .iter()
                .map(|(s, m)| (s.as_str(), *m))
                .collect();
            let unit_keys: BTreeSet<(&str, i32, u32)> = monthly
                .units
                .iter()
                .map(|u| (u.station_id.as_str(), u.year, u.month))
                .collect();
            let used = records
                .iter()
                .filter(|r| {
                    let (y, m) = (r.date.year(), r.date.month());
                    spec.years().contains(&y)
                        && keep.contains(&(r.station_id.as_str(), m))
                        && unit_keys.contains(&(r.station_id.as_str(), y, m))
                })
                .count();
            (panel.samples, panel.stations, monthly.omitted, used)
        }
        PanelMode::SingleStationDaily => {
            if resolution == Resolution::Monthly {
                return Err(Error::InvalidArgument(
                    "single-station daily mode needs a daily file".into(),
                ));
            }
            let samples = assemble_daily_annual_samples(records, spec)?;
            let kept: BTreeSet<i32> = samples.iter().map(|s| s.year()).collect();
            let used = records
                .iter()
                .filter(|r| kept.contains(&r.date.year()))
                .count();
            let stations = records
                .first()
                .map(|r| vec![r.station_id.clone()])
                .unwrap_or_default();
            (samples, stations, Vec::new(), used)
        }
    };
    Ok(AssembledPanel {
        samples,
        stations,
        omitted_months,
        accounting: RowAccounting {
            total: parsed.total_rows,
            rejected: parsed.rejects.len(),
            used,
            filtered: records.len() - used,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn rec(station: &str, y: i32, m: u32, d: u32, t: f64) -> StationRecord {
        StationRecord {
            station_id: station.into(),
            date: NaiveDate::from_ymd_opt(y, m, d).unwrap(),
            tmin: None,
            tmax: None,
            tavg: t,
        }
    }

    fn unit(station: &str, year: i32, month: u32, value: f64) -> StationMonthUnit {
        StationMonthUnit {
            station_id: station.into(),
            year,
            month,
            value,
        }
    }

    fn full_units(station: &str, years: std::ops::RangeInclusive<i32>) -> Vec<StationMonthUnit> {
        years
            .flat_map(|y| (1..=12).map(move |m| unit(station, y, m, m as f64 + y as f64 / 1000.0)))
            .collect()
    }

    #[test]
    fn constant_month_mean() {
        let records: Vec<_> = (1..=31).map(|d| rec("A", 1950, 7, d, 10.0)).collect();
        let m = build_station_month_units(&records, 0.8);
        assert_eq!(m.units.len(), 1);
        assert_eq!(m.units[0].value, 10.0);
    }

    #[test]
    fn coverage_rule_omits_sparse_month() {
        let records: Vec<_> = (1..=20).map(|d| rec("A", 1950, 7, d, 10.0)).collect();
        let m = build_station_month_units(&records, 0.8);
        assert!(m.units.is_empty());
        assert_eq!(m.omitted.len(), 1);
        assert_eq!(m.omitted[0].days_present, 20);
        assert_eq!(m.omitted[0].days_in_month, 31);
    }

    #[test]
    fn month_mean_matches_explicit_sum() {
        let records: Vec<_> = (1..=30).map(|d| rec("A", 1950, 6, d, d as f64)).collect();
        let m = build_station_month_units(&records, 0.8);
        let oracle = (1..=30).map(|d| d as f64).sum::<f64>() / 30.0;
        assert_eq!(oracle, 15.5);
        assert_eq!(m.units[0].value, oracle);
    }

    #[test]
    fn thirty_complete_stations_give_360_values() {
        let units: Vec<_> = (0..30)
            .flat_map(|i| full_units(&format!("S{i:02}"), 1950..=2019))
            .collect();
        let panel = select_balanced_panel(&units, &PanelSpec::new(1950, 2019)).unwrap();
        assert_eq!(panel.stations.len(), 30);
        assert_eq!(panel.samples.len(), 70);
        assert!(panel.samples.iter().all(|s| s.n() == 360));
    }

    #[test]
    fn one_missing_month_excludes_station() {
        let mut units = full_units("A", 1950..=1960);
        units.extend(full_units("B", 1950..=1960));
        units.retain(|u| !(u.station_id == "B" && u.year == 1955 && u.month == 3));
        let panel = select_balanced_panel(&units, &PanelSpec::new(1950, 1960)).unwrap();
        assert_eq!(panel.stations, vec!["A".to_string()]);
        assert!(panel.samples.iter().all(|s| s.n() == 12));

        let mut spec = PanelSpec::new(1950, 1960);
        spec.rule = PanelRule::PerMonth;
        let panel = select_balanced_panel(&units, &spec).unwrap();
        assert_eq!(panel.stations.len(), 2);
        assert!(panel.samples.iter().all(|s| s.n() == 23));
    }

    #[test]
    fn empty_panel_names_worst_stations() {
        let mut units = full_units("A", 1950..=1952);
        units.retain(|u| u.month != 5);
        units.extend(
            full_units("B", 1950..=1952)
                .into_iter()
                .filter(|u| u.year != 1951),
        );
        let err = select_balanced_panel(&units, &PanelSpec::new(1950, 1952)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("B (12 of 36"), "{msg}");
        assert!(msg.contains("A (3 of 36"), "{msg}");
    }

    #[test]
    fn period_outside_data_is_rejected() {
        let units = full_units("A", 1960..=1970);
        assert!(matches!(
            select_balanced_panel(&units, &PanelSpec::new(1950, 1970)),
            Err(Error::InvalidPanel(_))
        ));
    }

    fn daily_year(station: &str, year: i32, f: impl Fn(u32) -> f64) -> Vec<StationRecord> {
        let start = NaiveDate::from_ymd_opt(year, 1, 1).unwrap();
        start
            .iter_days()
            .take_while(|d| d.year() == year)
            .map(|d| StationRecord {
                station_id: station.into(),
                date: d,
                tmin: None,
                tmax: None,
                tavg: f(d.ordinal()),
            })
            .collect()
    }

    #[test]
    fn daily_samples_follow_calendar() {
        let mut records = daily_year("M", 1950, |d| d as f64);
        records.extend(daily_year("M", 1952, |_| 15.0));
        records.extend(daily_year("M", 1951, |d| d as f64).into_iter().take(100));
        let mut spec = PanelSpec::new(1950, 1952);
        spec.mode = PanelMode::SingleStationDaily;
        let samples = assemble_daily_annual_samples(&records, &spec).unwrap();
        assert_eq!(samples.len(), 2);
        assert_eq!(samples[0].n(), 365);
        assert_eq!(samples[1].n(), 366);
        assert!(samples[1].values().iter().all(|v| *v == 15.0));
    }

    #[test]
    fn daily_mode_rejects_multiple_stations() {
        let mut records = daily_year("M", 1950, |_| 1.0);
        records.extend(daily_year("N", 1950, |_| 1.0));
        let mut spec = PanelSpec::new(1950, 1951);
        spec.mode = PanelMode::SingleStationDaily;
        assert!(assemble_daily_annual_samples(&records, &spec).is_err());
    }
}
