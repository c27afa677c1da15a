//! Trajectory ingestion: a minimal highD-like CSV schema, scene
//! reconstruction, and pairing of ramp vehicles with their main-road
//! conflict partners.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calib::TrackPoint;
use crate::error::{Error, Result};

/// Required CSV columns, in canonical order.
pub const REQUIRED_COLUMNS: [&str; 9] = [
    "frame",
    "id",
    "x",
    "y",
    "xVelocity",
    "yVelocity",
    "xAcceleration",
    "yAcceleration",
    "laneId",
];

/// Optional precomputed lane-change probability column.
pub const LC_PROB_COLUMN: &str = "lcProb";

/// Static description of one recording. Lane ids index the gaps between
/// consecutive lane markings, 1-based: lane i spans markings[i-1]..markings[i].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    /// Frames per second.
    pub frame_rate: f64,
    /// Ordered lateral positions of the lane markings, m.
    pub lane_markings: Vec<f64>,
    /// Lane ids that belong to the on-ramp.
    pub ramp_lane_ids: Vec<i64>,
    /// Longitudinal position where the ramp ends, m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_end_x: Option<f64>,
    /// Travel direction sign along x (+1 or -1).
    pub x_direction: f64,
}

impl RecordingMeta {
    pub fn validate(&self) -> Result<()> {
        if self.frame_rate <= 0.0 {
            return Err(Error::BadCell {
                row: 0,
                column: "frame_rate".into(),
                value: self.frame_rate.to_string(),
            });
        }
        let ordered = self
            .lane_markings
            .windows(2)
            .all(|w| w[0] < w[1]);
        if !ordered {
            return Err(Error::BadCell {
                row: 0,
                column: "lane_markings".into(),
                value: format!("{:?}", self.lane_markings),
            });
        }
        Ok(())
    }

    pub fn lane_count(&self) -> usize {
        self.lane_markings.len().saturating_sub(1)
    }

    /// Lateral bounds of a 1-based lane id.
    pub fn lane_bounds(&self, lane_id: i64) -> Option<(f64, f64)> {
        if lane_id < 1 || lane_id as usize > self.lane_count() {
            return None;
        }
        let i = lane_id as usize;
        Some((self.lane_markings[i - 1], self.lane_markings[i]))
    }

    pub fn is_ramp_lane(&self, lane_id: i64) -> bool {
        self.ramp_lane_ids.contains(&lane_id)
    }

    /// The main lane a ramp vehicle merges into: the first adjacent lane
    /// that exists and is not itself a ramp lane.
    pub fn target_lane_for_ramp(&self, ramp_lane: i64) -> Option<i64> {
        [ramp_lane - 1, ramp_lane + 1]
            .into_iter()
            .find(|&cand| self.lane_bounds(cand).is_some() && !self.is_ramp_lane(cand))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let meta: RecordingMeta = serde_json::from_reader(std::io::BufReader::new(file))?;
        meta.validate()?;
        Ok(meta)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}

/// A parsed recording: metadata plus per-vehicle tracks ordered by frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub meta: RecordingMeta,
    pub tracks: BTreeMap<i64, Vec<TrackPoint>>,
}

/// One pairing of a ramp vehicle with its main-road conflict partner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehiclePair {
    /// Main-road vehicle (P0).
    pub ego_id: i64,
    /// Ramp vehicle (P1).
    pub other_id: i64,
    /// Main-road vehicle ahead of the ramp vehicle, when present.
    pub lead_id: Option<i64>,
    /// Number of frames the pair coexists.
    pub overlap: usize,
}

/// Pairing output plus a count of ramp vehicles skipped for lack of a
/// usable partner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairExtraction {
    pub pairs: Vec<VehiclePair>,
    pub skipped: usize,
}

fn parse_cell<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, column: &str, line: usize) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.trim().parse().map_err(|_| Error::BadCell {
        row: line,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

/// Loads a recording from a tracks CSV and a metadata JSON file.
///
/// The header row is mandatory; extra columns are ignored; rows may appear
/// in any order and are normalized by (id, frame). Duplicate (id, frame)
/// rows are rejected.
pub fn load_scene(tracks_path: &Path, meta_path: &Path) -> Result<Scene> {
    let meta = RecordingMeta::load(meta_path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(tracks_path)?;

    let headers = reader.headers()?.clone();
    let index_of = |name: &str| headers.iter().position(|h| h == name);
    let mut columns = [0usize; REQUIRED_COLUMNS.len()];
    for (i, name) in REQUIRED_COLUMNS.iter().enumerate() {
        columns[i] = index_of(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let lc_prob_idx = index_of(LC_PROB_COLUMN);

    let mut tracks: BTreeMap<i64, Vec<TrackPoint>> = BTreeMap::new();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record?;
        rows += 1;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(rows + 1);
        let frame: u64 = parse_cell(&record, columns[0], "frame", line)?;
        let id: i64 = parse_cell(&record, columns[1], "id", line)?;
        let lc_prob = match lc_prob_idx {
            Some(idx) => {
                let raw = record.get(idx).unwrap_or("").trim();
                if raw.is_empty() {
                    None
                } else {
                    Some(parse_cell::<f64>(&record, idx, LC_PROB_COLUMN, line)?)
                }
            }
            None => None,
        };
        let point = TrackPoint {
            frame,
            x: parse_cell(&record, columns[2], "x", line)?,
            y: parse_cell(&record, columns[3], "y", line)?,
            vx: parse_cell(&record, columns[4], "xVelocity", line)?,
            vy: parse_cell(&record, columns[5], "yVelocity", line)?,
            ax: parse_cell(&record, columns[6], "xAcceleration", line)?,
            ay: parse_cell(&record, columns[7], "yAcceleration", line)?,
            lane_id: parse_cell(&record, columns[8], "laneId", line)?,
            lc_prob,
        };
        tracks.entry(id).or_default().push(point);
    }
    if rows == 0 {
        return Err(Error::EmptyTracks);
    }
    for (&id, track) in tracks.iter_mut() {
        track.sort_by_key(|p| p.frame);
        for w in track.windows(2) {
            if w[0].frame == w[1].frame {
                return Err(Error::DuplicateFrame {
                    id,
                    frame: w[0].frame,
                });
            }
        }
    }
    Ok(Scene { meta, tracks })
}

/// Writes a scene's tracks back to CSV in the canonical column order. The
/// lcProb column is emitted only when some point carries a value.
pub fn save_scene(scene: &Scene, tracks_path: &Path) -> Result<()> {
    let has_lc_prob = scene
        .tracks
        .values()
        .flatten()
        .any(|p| p.lc_prob.is_some());
    let mut writer = csv::Writer::from_path(tracks_path)?;
    let mut header: Vec<&str> = REQUIRED_COLUMNS.to_vec();
    if has_lc_prob {
        header.push(LC_PROB_COLUMN);
    }
    writer.write_record(&header)?;
    for (id, track) in &scene.tracks {
        for p in track {
            let mut row = vec![
                p.frame.to_string(),
                id.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.vx.to_string(),
                p.vy.to_string(),
                p.ax.to_string(),
                p.ay.to_string(),
                p.lane_id.to_string(),
            ];
            if has_lc_prob {
                row.push(p.lc_prob.map(|v| v.to_string()).unwrap_or_default());
            }
            writer.write_record(&row)?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn point_at(track: &[TrackPoint], frame: u64) -> Option<&TrackPoint> {
    track
        .binary_search_by_key(&frame, |p| p.frame)
        .ok()
        .map(|i| &track[i])
}

fn overlap_frames(a: &[TrackPoint], b: &[TrackPoint]) -> usize {
    let (a_first, a_last) = match (a.first(), a.last()) {
        (Some(f), Some(l)) => (f.frame, l.frame),
        _ => return 0,
    };
    b.iter()
        .filter(|p| p.frame >= a_first && p.frame <= a_last && point_at(a, p.frame).is_some())
        .count()
}

/// Pairs every ramp vehicle with the nearest main-road vehicle behind it in
/// the target lane at the merge-approach frame (the last frame spent on the
/// ramp), plus the nearest vehicle ahead as the lead. Ramp vehicles with no
/// usable partner are skipped and counted.
pub fn extract_pairs(scene: &Scene) -> PairExtraction {
    let meta = &scene.meta;
    let dir = if meta.x_direction >= 0.0 { 1.0 } else { -1.0 };
    let mut pairs = Vec::new();
    let mut skipped = 0usize;

    for (&ramp_id, ramp_track) in &scene.tracks {
        let starts_on_ramp = ramp_track
            .first()
            .is_some_and(|p| meta.is_ramp_lane(p.lane_id));
        if !starts_on_ramp {
            continue;
        }
        // merge-approach frame: last frame before leaving the ramp lanes
        let departure = ramp_track
            .iter()
            .position(|p| !meta.is_ramp_lane(p.lane_id));
        let approach_idx = match departure {
            Some(0) => {
                skipped += 1;
                continue;
            }
            Some(i) => i - 1,
            None => ramp_track.len() - 1,
        };
        let target_lane = match departure {
            Some(i) => ramp_track[i].lane_id,
            None => match meta.target_lane_for_ramp(ramp_track[0].lane_id) {
                Some(lane) => lane,
                None => {
                    skipped += 1;
                    continue;
                }
            },
        };
        let approach = &ramp_track[approach_idx];
        let s_ramp = approach.x * dir;

        let mut ego: Option<(f64, i64)> = None;
        let mut lead: Option<(f64, i64)> = None;
        for (&cand_id, cand_track) in &scene.tracks {
            if cand_id == ramp_id {
                continue;
            }
            if cand_track
                .first()
                .is_some_and(|p| meta.is_ramp_lane(p.lane_id))
            {
                continue;
            }
            let Some(p) = point_at(cand_track, approach.frame) else {
                continue;
            };
            if p.lane_id != target_lane {
                continue;
            }
            let gap = p.x * dir - s_ramp;
            if gap < 0.0 {
                let key = (-gap, cand_id);
                if ego.is_none_or(|cur| key < cur) {
                    ego = Some(key);
                }
            } else {
                let key = (gap, cand_id);
                if lead.is_none_or(|cur| key < cur) {
                    lead = Some(key);
                }
            }
        }
        let Some((_, ego_id)) = ego else {
            skipped += 1;
            continue;
        };
        let overlap = overlap_frames(&scene.tracks[&ego_id], ramp_track);
        if overlap < 2 {
            skipped += 1;
            continue;
        }
        pairs.push(VehiclePair {
            ego_id,
            other_id: ramp_id,
            lead_id: lead.map(|(_, id)| id),
            overlap,
        });
    }
    PairExtraction { pairs, skipped }
}
