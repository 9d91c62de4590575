//! CSV forms of fronts, attainment surfaces and hypervolume histories.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! gives the exact values that were written.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{AttainmentSurfaces, FrontPoint, HistoryPoint, Objectives};

#[derive(Debug, Serialize, Deserialize)]
struct FrontRow {
    f1: f64,
    f2_neg: f64,
    cv: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EafRow {
    level: String,
    f1: f64,
    f2_neg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct HistoryRow {
    generation: usize,
    hv: f64,
    front_size: usize,
}

pub fn write_front_csv<W: Write>(out: W, points: &[FrontPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(FrontRow { f1: p.objectives[0], f2_neg: p.objectives[1], cv: p.cv })?;
    }
    if points.is_empty() {
        w.write_record(["f1", "f2_neg", "cv"])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows in file order; no filtering is applied.
pub fn read_front_csv<R: Read>(input: R) -> csv::Result<Vec<FrontPoint>> {
    csv::Reader::from_reader(input)
        .deserialize::<FrontRow>()
        .map(|r| r.map(|r| FrontPoint { objectives: [r.f1, r.f2_neg], cv: r.cv, genome: None }))
        .collect()
}

pub fn write_eaf_csv<W: Write>(out: W, surfaces: &AttainmentSurfaces) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "f1", "f2_neg"])?;
    for (level, surface) in [("best", &surfaces.best), ("median", &surfaces.median), ("worst", &surfaces.worst)] {
        for p in surface {
            w.write_record([level.to_string(), p[0].to_string(), p[1].to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads back `(best, median, worst)` staircases.
pub fn read_eaf_csv<R: Read>(input: R) -> csv::Result<[Vec<Objectives>; 3]> {
    let mut out: [Vec<Objectives>; 3] = Default::default();
    for row in csv::Reader::from_reader(input).deserialize::<EafRow>() {
        let row = row?;
        let slot = match row.level.as_str() {
            "best" => 0,
            "median" => 1,
            "worst" => 2,
            other => {
                return Err(csv::Error::from(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("unknown attainment level `{other}`"),
                )))
            }
        };
        out[slot].push([row.f1, row.f2_neg]);
    }
    Ok(out)
}

pub fn write_history_csv<W: Write>(out: W, history: &[HistoryPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["generation", "hv", "front_size"])?;
    for h in history {
        w.write_record([h.generation.to_string(), h.hypervolume.to_string(), h.front_size.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_history_csv<R: Read>(input: R) -> csv::Result<Vec<HistoryPoint>> {
    csv::Reader::from_reader(input)
        .deserialize::<HistoryRow>()
        .map(|r| r.map(|r| HistoryPoint { generation: r.generation, hypervolume: r.hv, front_size: r.front_size }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_round_trip_is_exact() {
        let pts = vec![
            FrontPoint { objectives: [0.1 + 0.2, -1.0 / 3.0], cv: 0.0, genome: None },
            FrontPoint { objectives: [1e-300, -123456.789], cv: 2.5e-17, genome: None },
        ];
        let mut buf = Vec::new();
        write_front_csv(&mut buf, &pts).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("f1,f2_neg,cv\n"));
        assert_eq!(read_front_csv(&buf[..]).unwrap(), pts);
    }

    #[test]
    fn empty_front_keeps_header() {
        let mut buf = Vec::new();
        write_front_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "f1,f2_neg,cv\n");
        assert!(read_front_csv(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn eaf_round_trip() {
        let s =
            AttainmentSurfaces { best: vec![[0.0, 1.0], [1.0, 0.0]], median: vec![[0.5, 0.5]], worst: vec![], k: 2 };
        let mut buf = Vec::new();
        write_eaf_csv(&mut buf, &s).unwrap();
        let [b, m, w] = read_eaf_csv(&buf[..]).unwrap();
        assert_eq!((b, m, w), (s.best, s.median, s.worst));
    }

    #[test]
    fn history_round_trip() {
        let h = vec![
            HistoryPoint { generation: 0, hypervolume: 0.25, front_size: 3 },
            HistoryPoint { generation: 1, hypervolume: 0.7000000000000001, front_size: 4 },
        ];
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &h).unwrap();
        assert_eq!(read_history_csv(&buf[..]).unwrap(), h);
    }
}
