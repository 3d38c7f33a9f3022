//! Predictor construction for time-series inputs: Fourier-basis
//! featurization of uniformly sampled series and the velocity/accuracy
//! response transform.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_norm_lstsq, Matrix};

/// One channel of one observation: an ordered, uniformly sampled series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub obs_id: String,
    pub channel: String,
    pub samples: Vec<f64>,
}

impl SeriesRecord {
    pub fn new(
        obs_id: impl Into<String>,
        channel: impl Into<String>,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooSmall {
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(row) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col: 0 });
        }
        Ok(Self {
            obs_id: obs_id.into(),
            channel: channel.into(),
            samples,
        })
    }
}

/// Basis values at grid point `i` of `m`: constant, then interleaved
/// cos/sin pairs for harmonics `1..=k` over one fundamental period.
fn basis_row(i: usize, m: usize, k: usize) -> Vec<f64> {
    let t = i as f64 / m as f64;
    let mut row = Vec::with_capacity(2 * k + 1);
    row.push(1.0);
    for j in 1..=k {
        let angle = 2.0 * PI * j as f64 * t;
        row.push(angle.cos());
        row.push(angle.sin());
    }
    row
}

/// Least-squares projection of the series onto the Fourier basis
/// `{1, cos(2 pi j t / T), sin(2 pi j t / T) : j = 1..k}` over the observed
/// grid, with the observation window taken as one fundamental period.
/// Returns the `2k + 1` coefficients `[a0, a1, b1, .., ak, bk]`.
pub fn fourier_features(series: &SeriesRecord, k: usize) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::InvalidConfig("need at least one harmonic".into()));
    }
    let m = series.samples.len();
    let cols = 2 * k + 1;
    if cols > m {
        return Err(Error::TooFewSamples {
            needed: cols,
            got: m,
            harmonics: k,
        });
    }
    let rows: Vec<Vec<f64>> = (0..m).map(|i| basis_row(i, m, k)).collect();
    let design = Matrix::from_rows(&rows);
    Ok(min_norm_lstsq(&design, &series.samples))
}

/// Rebuild the series values on the original grid from coefficients
/// returned by [`fourier_features`].
pub fn reconstruct(coefficients: &[f64], m: usize) -> Vec<f64> {
    let k = (coefficients.len() - 1) / 2;
    (0..m)
        .map(|i| {
            basis_row(i, m, k)
                .iter()
                .zip(coefficients)
                .map(|(b, c)| b * c)
                .sum()
        })
        .collect()
}

/// The serve point scale: nine for the center of the target area down to
/// zero for a fault.
pub const VALID_POINTS: [i64; 5] = [0, 1, 3, 6, 9];

/// Velocity/accuracy response: `(velocity^2 / 100) * (points / 9)`.
pub fn va_index(ball_velocity_kph: f64, achieved_points: i64) -> Result<f64> {
    if !(ball_velocity_kph >= 0.0 && ball_velocity_kph.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "ball velocity must be a finite non-negative number, got {ball_velocity_kph}"
        )));
    }
    if !VALID_POINTS.contains(&achieved_points) {
        return Err(Error::InvalidPoints(achieved_points));
    }
    Ok(ball_velocity_kph * ball_velocity_kph / 100.0 * achieved_points as f64 / 9.0)
}

/// Featurize a collection of series records into one predictor row per
/// observation: Fourier coefficients of every channel, concatenated in
/// lexicographic channel order. Every observation must carry the same
/// channel set.
pub fn featurize_records(records: &[SeriesRecord], k: usize) -> Result<(Vec<String>, Matrix)> {
    let mut by_obs: BTreeMap<&str, BTreeMap<&str, &SeriesRecord>> = BTreeMap::new();
    for rec in records {
        let prev = by_obs
            .entry(&rec.obs_id)
            .or_default()
            .insert(&rec.channel, rec);
        if prev.is_some() {
            return Err(Error::InvalidParams(format!(
                "duplicate series for observation `{}`, channel `{}`",
                rec.obs_id, rec.channel
            )));
        }
    }
    if by_obs.is_empty() {
        return Err(Error::TooSmall { needed: 1, got: 0 });
    }
    let channels: Vec<String> = by_obs
        .values()
        .next()
        .unwrap()
        .keys()
        .map(|c| c.to_string())
        .collect();
    let mut obs_ids = Vec::with_capacity(by_obs.len());
    let mut rows = Vec::with_capacity(by_obs.len());
    for (obs, chans) in &by_obs {
        let have: Vec<String> = chans.keys().map(|c| c.to_string()).collect();
        if have != channels {
            return Err(Error::InvalidParams(format!(
                "observation `{obs}` has channels {have:?}, expected {channels:?}"
            )));
        }
        let mut row = Vec::with_capacity(channels.len() * (2 * k + 1));
        for rec in chans.values() {
            row.extend(fourier_features(rec, k)?);
        }
        obs_ids.push(obs.to_string());
        rows.push(row);
    }
    Ok((obs_ids, Matrix::from_rows(&rows)))
}

/// Read a long-format series table: header `obs_id,channel,t_index,value`,
/// one sample per line, UTF-8 and `.` decimals. Samples are ordered by
/// `t_index` within each `(obs_id, channel)` pair.
pub fn read_series_csv(path: &Path) -> Result<Vec<SeriesRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_series_csv(&text)
}

pub fn parse_series_csv(text: &str) -> Result<Vec<SeriesRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::ParseError {
        row: 1,
        column: "-".into(),
        message: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected = ["obs_id", "channel", "t_index", "value"];
    for name in expected {
        if !cols.contains(&name) {
            return Err(Error::MissingColumn(name.into()));
        }
    }
    let idx_of = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    let (oi, ci, ti, vi) = (
        idx_of("obs_id"),
        idx_of("channel"),
        idx_of("t_index"),
        idx_of("value"),
    );

    let mut table: BTreeMap<(String, String), Vec<(i64, f64)>> = BTreeMap::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = line_no + 1; // 1-based, counting the header line
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(Error::ParseError {
                row,
                column: "-".into(),
                message: format!("expected {} cells, found {}", cols.len(), cells.len()),
            });
        }
        let t: i64 = cells[ti].parse().map_err(|_| Error::ParseError {
            row,
            column: "t_index".into(),
            message: format!("`{}` is not an integer", cells[ti]),
        })?;
        let v: f64 = cells[vi].parse().map_err(|_| Error::ParseError {
            row,
            column: "value".into(),
            message: format!("`{}` is not a number", cells[vi]),
        })?;
        table
            .entry((cells[oi].to_string(), cells[ci].to_string()))
            .or_default()
            .push((t, v));
    }

    let mut records = Vec::with_capacity(table.len());
    for ((obs, chan), mut samples) in table {
        samples.sort_by_key(|(t, _)| *t);
        let values: Vec<f64> = samples.into_iter().map(|(_, v)| v).collect();
        records.push(SeriesRecord::new(obs, chan, values)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_series(values: Vec<f64>) -> SeriesRecord {
        SeriesRecord::new("o1", "c1", values).unwrap()
    }

    #[test]
    fn constant_series_loads_only_the_constant() {
        let series = grid_series(vec![3.5; 32]);
        let coeffs = fourier_features(&series, 3).unwrap();
        assert!((coeffs[0] - 3.5).abs() < 1e-10);
        for c in &coeffs[1..] {
            assert!(c.abs() < 1e-10);
        }
    }

    #[test]
    fn pure_cosine_recovers_its_amplitude() {
        let m = 64;
        let series = grid_series(
            (0..m)
                .map(|i| 3.0 * (2.0 * PI * i as f64 / m as f64).cos())
                .collect(),
        );
        let coeffs = fourier_features(&series, 2).unwrap();
        assert!((coeffs[1] - 3.0).abs() <= 1e-8, "cos1 = {}", coeffs[1]);
        for (pos, c) in coeffs.iter().enumerate() {
            if pos != 1 {
                assert!(c.abs() <= 1e-8, "coefficient {pos} = {c}");
            }
        }
    }

    #[test]
    fn band_limited_round_trip() {
        let m = 48;
        let k = 4;
        // Synthesize from known coefficients, recover, compare pointwise.
        let coeffs: Vec<f64> = vec![0.7, 1.2, -0.4, 0.0, 2.0, -1.5, 0.3, 0.9, -0.2];
        let values = reconstruct(&coeffs, m);
        let series = grid_series(values.clone());
        let recovered = fourier_features(&series, k).unwrap();
        let rebuilt = reconstruct(&recovered, m);
        for (a, b) in values.iter().zip(&rebuilt) {
            assert!((a - b).abs() <= 1e-8);
        }
        for (a, b) in coeffs.iter().zip(&recovered) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn too_short_series_is_reported() {
        let series = grid_series(vec![1.0, 2.0, 3.0]);
        let err = fourier_features(&series, 2).unwrap_err();
        assert!(matches!(
            err,
            Error::TooFewSamples {
                needed: 5,
                got: 3,
                harmonics: 2
            }
        ));
    }

    #[test]
    fn va_index_examples() {
        assert_eq!(va_index(100.0, 9).unwrap(), 100.0);
        assert_eq!(va_index(231.7, 0).unwrap(), 0.0);
        assert_eq!(va_index(180.0, 3).unwrap(), 108.0);
        assert!(matches!(va_index(100.0, 2), Err(Error::InvalidPoints(2))));
        assert!(va_index(-5.0, 9).is_err());
    }

    #[test]
    fn series_table_parses_and_orders() {
        let text = "obs_id,channel,t_index,value\n\
                    s1,accel_x,1,0.5\n\
                    s1,accel_x,0,0.25\n\
                    s1,gyro_z,0,1.0\n\
                    s1,gyro_z,1,2.0\n\
                    s2,accel_x,0,0.0\n\
                    s2,accel_x,1,1.0\n\
                    s2,gyro_z,0,3.0\n\
                    s2,gyro_z,1,4.0\n";
        let records = parse_series_csv(text).unwrap();
        assert_eq!(records.len(), 4);
        let first = &records[0];
        assert_eq!(first.obs_id, "s1");
        assert_eq!(first.channel, "accel_x");
        assert_eq!(first.samples, vec![0.25, 0.5]); // reordered by t_index
    }

    #[test]
    fn series_table_reports_bad_cells() {
        let text = "obs_id,channel,t_index,value\ns1,c,0,abc\n";
        let err = parse_series_csv(text).unwrap_err();
        match err {
            Error::ParseError { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "value");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_header_column_is_reported() {
        let text = "obs_id,channel,value\ns1,c,0.5\n";
        assert!(matches!(
            parse_series_csv(text),
            Err(Error::MissingColumn(c)) if c == "t_index"
        ));
    }

    proptest! {
        #[test]
        fn features_are_linear_in_the_series(
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
            seed in 0u64..500,
        ) {
            let m = 24;
            let s1: Vec<f64> = (0..m).map(|i| ((i as u64 * 31 + seed) % 17) as f64 / 4.0).collect();
            let s2: Vec<f64> = (0..m).map(|i| ((i as u64 * 13 + seed * 3) % 23) as f64 / 4.0).collect();
            let combo: Vec<f64> = s1.iter().zip(&s2).map(|(u, v)| a * u + b * v).collect();
            let f1 = fourier_features(&grid_series(s1), 3).unwrap();
            let f2 = fourier_features(&grid_series(s2), 3).unwrap();
            let fc = fourier_features(&grid_series(combo), 3).unwrap();
            for i in 0..f1.len() {
                let expected = a * f1[i] + b * f2[i];
                prop_assert!((fc[i] - expected).abs() < 1e-9,
                    "coefficient {i}: {} vs {expected}", fc[i]);
            }
        }

        #[test]
        fn va_index_is_monotone(v1 in 0.0f64..300.0, v2 in 0.0f64..300.0) {
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            let points = [0i64, 1, 3, 6, 9];
            for w in points.windows(2) {
                prop_assert!(va_index(lo, w[0]).unwrap() <= va_index(lo, w[1]).unwrap());
            }
            for &p in &points {
                prop_assert!(va_index(lo, p).unwrap() <= va_index(hi, p).unwrap());
            }
        }
    }
}
