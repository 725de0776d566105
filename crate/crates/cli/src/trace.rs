//! Per-frame criticality trace in CSV form.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use multihyp_core::engine::RunMetrics;
use multihyp_core::risk::CriticalityResult;

pub const HEADER: [&str; 18] = [
    "frame",
    "timestamp",
    "status",
    "p_cra",
    "colliding_combinations",
    "ego_trajectories",
    "co_trajectories",
    "co_probabilities",
    "escape_1",
    "escape_1_p",
    "escape_2",
    "escape_2_p",
    "escape_3",
    "escape_3_p",
    "street_ms",
    "trajectories_ms",
    "collision_ms",
    "risk_ms",
];

/// Index of the first timing column; everything before it is deterministic.
pub const TIMING_START: usize = 14;

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub frame: String,
    pub timestamp: f64,
    /// `ok` or the stage-attributed error message.
    pub status: String,
    pub p_cra: Option<f64>,
    pub colliding: usize,
    pub ego_trajectories: usize,
    pub co_trajectories: usize,
    pub co_probabilities: Vec<(usize, f64)>,
    pub escapes: Vec<(usize, f64)>,
    pub stage_ms: [f64; 4],
}

impl TraceRecord {
    pub fn from_result(frame: &str, result: &CriticalityResult, metrics: &RunMetrics) -> Self {
        let s = &metrics.stages;
        Self {
            frame: frame.to_string(),
            timestamp: result.timestamp,
            status: "ok".to_string(),
            p_cra: Some(result.p_cra),
            colliding: result.collisions.len(),
            ego_trajectories: result.ego_trajectories,
            co_trajectories: result.co_trajectories,
            co_probabilities: result.objects.iter().map(|o| (o.object, o.probability)).collect(),
            escapes: result.escape_routes.iter().take(3).map(|e| (e.ego, e.probability)).collect(),
            stage_ms: [
                s.street.seconds() * 1e3,
                s.trajectories.seconds() * 1e3,
                s.collision.seconds() * 1e3,
                s.risk.seconds() * 1e3,
            ],
        }
    }

    pub fn failed(frame: &str, timestamp: f64, message: &str) -> Self {
        Self {
            frame: frame.to_string(),
            timestamp,
            status: message.to_string(),
            p_cra: None,
            colliding: 0,
            ego_trajectories: 0,
            co_trajectories: 0,
            co_probabilities: Vec::new(),
            escapes: Vec::new(),
            stage_ms: [0.0; 4],
        }
    }

    fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.frame.clone(),
            sig12(self.timestamp),
            self.status.clone(),
            self.p_cra.map(sig12).unwrap_or_default(),
            self.colliding.to_string(),
            self.ego_trajectories.to_string(),
            self.co_trajectories.to_string(),
            self.co_probabilities
                .iter()
                .map(|(id, p)| format!("{id}:{}", sig12(*p)))
                .collect::<Vec<_>>()
                .join(";"),
        ];
        for k in 0..3 {
            match self.escapes.get(k) {
                Some((id, p)) => {
                    out.push(id.to_string());
                    out.push(sig12(*p));
                }
                None => {
                    out.push(String::new());
                    out.push(String::new());
                }
            }
        }
        out.extend(self.stage_ms.iter().map(|ms| format!("{ms:.3}")));
        out
    }
}

pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

fn opt_f64(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        Ok(Some(s.parse().with_context(|| format!("bad number {s:?}"))?))
    }
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        bail!("unexpected trace header: {}", header.join(","));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let f = |k: usize| row.get(k).unwrap_or("");
        let co_probabilities = f(7)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                let (id, p) = s.split_once(':').context("bad co probability")?;
                Ok((id.parse()?, p.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut escapes = Vec::new();
        for k in 0..3 {
            if let (Some(id), Some(p)) = (opt_f64(f(8 + 2 * k))?, opt_f64(f(9 + 2 * k))?) {
                escapes.push((id as usize, p));
            }
        }
        let mut stage_ms = [0.0; 4];
        for (k, ms) in stage_ms.iter_mut().enumerate() {
            *ms = f(TIMING_START + k).parse()?;
        }
        out.push(TraceRecord {
            frame: f(0).to_string(),
            timestamp: f(1).parse()?,
            status: f(2).to_string(),
            p_cra: opt_f64(f(3))?,
            colliding: f(4).parse()?,
            ego_trajectories: f(5).parse()?,
            co_trajectories: f(6).parse()?,
            co_probabilities,
            escapes,
            stage_ms,
        });
    }
    Ok(out)
}
