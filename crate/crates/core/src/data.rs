//! Roll-call matrices: loading, validation, filtering and audit.
//!
//! Two on-disk formats are accepted.
//!
//! CSV: the header is `legislator_id,party,group` followed by one column per
//! motion id. Each further row is one legislator; vote cells are `1` (yea),
//! `0` (nay), or `NA` / empty (missing).
//!
//! JSON: an object with `legislators` (objects with `id`, optional `name`,
//! `party`, optional `group`), `motions` (objects with `id` and optional
//! `label`, `topic`, `sponsor_flag`), and `votes`, a row-major array of rows
//! whose cells are `1`, `0` or `null`.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single recorded position. `Missing` covers both absence and abstention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vote {
    Yea,
    Nay,
    Missing,
}

impl Vote {
    pub fn is_observed(self) -> bool {
        self != Vote::Missing
    }

    /// 1 for yea, 0 for nay, `None` when missing.
    pub fn as_binary(self) -> Option<u8> {
        match self {
            Vote::Yea => Some(1),
            Vote::Nay => Some(0),
            Vote::Missing => None,
        }
    }

    fn csv_token(self) -> &'static str {
        match self {
            Vote::Yea => "1",
            Vote::Nay => "0",
            Vote::Missing => "NA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegislatorMeta {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub party: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

impl LegislatorMeta {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        LegislatorMeta {
            name: id.clone(),
            id,
            party: String::new(),
            group: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionMeta {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<String>,
    /// Government-sponsored indicator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sponsor_flag: Option<bool>,
}

impl MotionMeta {
    pub fn new(id: impl Into<String>) -> Self {
        MotionMeta {
            id: id.into(),
            label: None,
            topic: None,
            sponsor_flag: None,
        }
    }
}

/// An n × m grid of votes with legislator (row) and motion (column) metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct RollCallMatrix {
    n: usize,
    m: usize,
    votes: Vec<Vote>,
    legislators: Vec<LegislatorMeta>,
    motions: Vec<MotionMeta>,
}

impl RollCallMatrix {
    /// Builds a matrix from row-major votes, validating shape and id uniqueness.
    pub fn new(
        legislators: Vec<LegislatorMeta>,
        motions: Vec<MotionMeta>,
        votes: Vec<Vote>,
    ) -> Result<Self> {
        let n = legislators.len();
        let m = motions.len();
        if n < 2 {
            return Err(Error::validation(format!(
                "a roll-call matrix needs at least 2 legislators, got {n}"
            )));
        }
        if m < 1 {
            return Err(Error::validation("a roll-call matrix needs at least 1 motion"));
        }
        if votes.len() != n * m {
            return Err(Error::validation(format!(
                "expected {n}×{m} = {} votes, got {}",
                n * m,
                votes.len()
            )));
        }
        check_unique_ids("legislator", legislators.iter().map(|l| l.id.as_str()))?;
        check_unique_ids("motion", motions.iter().map(|mo| mo.id.as_str()))?;
        Ok(RollCallMatrix {
            n,
            m,
            votes,
            legislators,
            motions,
        })
    }

    /// Builds a matrix from rows of votes; ragged rows are rejected.
    pub fn from_rows(
        legislators: Vec<LegislatorMeta>,
        motions: Vec<MotionMeta>,
        rows: Vec<Vec<Vote>>,
    ) -> Result<Self> {
        if rows.len() != legislators.len() {
            return Err(Error::validation(format!(
                "{} vote rows for {} legislators",
                rows.len(),
                legislators.len()
            )));
        }
        let m = motions.len();
        let mut votes = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::validation(format!(
                    "ragged row {}: {} cells for {m} motions",
                    i + 1,
                    row.len()
                )));
            }
            votes.extend(row);
        }
        Self::new(legislators, motions, votes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn vote(&self, i: usize, j: usize) -> Vote {
        self.votes[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[Vote] {
        &self.votes[i * self.m..(i + 1) * self.m]
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn legislators(&self) -> &[LegislatorMeta] {
        &self.legislators
    }

    pub fn motions(&self) -> &[MotionMeta] {
        &self.motions
    }

    pub fn legislator_index(&self, id: &str) -> Option<usize> {
        self.legislators.iter().position(|l| l.id == id)
    }

    pub fn observed_count(&self) -> usize {
        self.votes.iter().filter(|v| v.is_observed()).count()
    }

    /// Number of observed votes cast by legislator `i`.
    pub fn legislator_observed(&self, i: usize) -> usize {
        self.row(i).iter().filter(|v| v.is_observed()).count()
    }

    /// (yeas, nays) on motion `j`.
    pub fn motion_tally(&self, j: usize) -> (usize, usize) {
        (0..self.n).fold((0, 0), |(y, n), i| match self.vote(i, j) {
            Vote::Yea => (y + 1, n),
            Vote::Nay => (y, n + 1),
            Vote::Missing => (y, n),
        })
    }

    /// Yea share among observed votes on motion `j`, `None` if nobody voted.
    pub fn yea_share(&self, j: usize) -> Option<f64> {
        let (y, n) = self.motion_tally(j);
        (y + n > 0).then(|| y as f64 / (y + n) as f64)
    }

    /// Keeps the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mut votes = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                votes.push(self.vote(i, j));
            }
        }
        Self::new(
            rows.iter().map(|&i| self.legislators[i].clone()).collect(),
            cols.iter().map(|&j| self.motions[j].clone()).collect(),
            votes,
        )
    }

    /// Writes the CSV interchange format.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["legislator_id", "party", "group"];
        header.extend(self.motions.iter().map(|mo| mo.id.as_str()));
        w.write_record(&header).map_err(csv_write_error)?;
        for (i, leg) in self.legislators.iter().enumerate() {
            let mut record = vec![
                leg.id.as_str(),
                leg.party.as_str(),
                leg.group.as_deref().unwrap_or(""),
            ];
            record.extend(self.row(i).iter().map(|v| v.csv_token()));
            w.write_record(&record).map_err(csv_write_error)?;
        }
        w.flush()
            .map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    /// Writes the JSON interchange format.
    pub fn to_json(&self) -> String {
        let doc = JsonDocument {
            legislators: self.legislators.clone(),
            motions: self.motions.clone(),
            votes: JsonVotes::Rows(
                (0..self.n)
                    .map(|i| self.row(i).iter().map(|v| v.as_binary()).collect())
                    .collect(),
            ),
        };
        serde_json::to_string_pretty(&doc).expect("roll-call document serializes")
    }
}

fn csv_write_error(e: csv::Error) -> Error {
    Error::io("<csv writer>", std::io::Error::other(e.to_string()))
}

fn check_unique_ids<'a>(kind: &str, ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if id.is_empty() {
            return Err(Error::validation(format!("empty {kind} id")));
        }
        if !seen.insert(id) {
            return Err(Error::validation(format!("duplicate {kind} id `{id}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DataFormat::Csv),
            "json" => Ok(DataFormat::Json),
            other => Err(Error::validation(format!("unknown data format `{other}`"))),
        }
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFormat::Csv => "csv",
            DataFormat::Json => "json",
        })
    }
}

pub fn load_roll_calls(path: &Path, format: DataFormat) -> Result<RollCallMatrix> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        DataFormat::Csv => read_csv(file),
        DataFormat::Json => {
            let mut text = String::new();
            file.read_to_string(&mut text)
                .map_err(|e| Error::io(path, e))?;
            parse_json(&text)
        }
    }
}

const CSV_FIXED_COLUMNS: [&str; 3] = ["legislator_id", "party", "group"];

/// Reads the CSV interchange format.
pub fn read_csv<R: Read>(reader: R) -> Result<RollCallMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(r) => r.map_err(csv_parse_error)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "empty file".into(),
            })
        }
    };
    for (k, want) in CSV_FIXED_COLUMNS.iter().enumerate() {
        let got = header.get(k).unwrap_or("");
        if got != *want {
            return Err(Error::Parse {
                line: 1,
                column: k as u64 + 1,
                message: format!("expected header column `{want}`, found `{got}`"),
            });
        }
    }
    let motions: Vec<MotionMeta> = header
        .iter()
        .skip(CSV_FIXED_COLUMNS.len())
        .map(MotionMeta::new)
        .collect();
    let width = header.len();

    let mut legislators = Vec::new();
    let mut votes = Vec::new();
    for record in records {
        let record = record.map_err(csv_parse_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::validation(format!(
                "ragged row at line {line}: {} fields, header has {width}",
                record.len()
            )));
        }
        let mut leg = LegislatorMeta::new(&record[0]);
        leg.party = record[1].to_string();
        leg.group = (!record[2].is_empty()).then(|| record[2].to_string());
        legislators.push(leg);
        for (k, cell) in record.iter().enumerate().skip(CSV_FIXED_COLUMNS.len()) {
            votes.push(parse_cell(cell).ok_or_else(|| Error::Parse {
                line,
                column: k as u64 + 1,
                message: format!("invalid vote `{cell}`; expected 1, 0, NA or empty"),
            })?);
        }
    }
    RollCallMatrix::new(legislators, motions, votes)
}

fn parse_cell(cell: &str) -> Option<Vote> {
    match cell {
        "1" => Some(Vote::Yea),
        "0" => Some(Vote::Nay),
        "" | "NA" => Some(Vote::Missing),
        _ => None,
    }
}

fn csv_parse_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    legislators: Vec<LegislatorMeta>,
    motions: Vec<MotionMeta>,
    votes: JsonVotes,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonVotes {
    Rows(Vec<Vec<Option<u8>>>),
    Flat(Vec<Option<u8>>),
}

/// Parses the JSON interchange format.
pub fn parse_json(text: &str) -> Result<RollCallMatrix> {
    let doc: JsonDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: e.column() as u64,
        message: e.to_string(),
    })?;
    let to_vote = |cell: Option<u8>| match cell {
        Some(1) => Ok(Vote::Yea),
        Some(0) => Ok(Vote::Nay),
        None => Ok(Vote::Missing),
        Some(other) => Err(Error::validation(format!("invalid vote value {other}"))),
    };
    match doc.votes {
        JsonVotes::Rows(rows) => {
            let rows = rows
                .into_iter()
                .map(|row| row.into_iter().map(to_vote).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            RollCallMatrix::from_rows(doc.legislators, doc.motions, rows)
        }
        JsonVotes::Flat(cells) => {
            let votes = cells.into_iter().map(to_vote).collect::<Result<Vec<_>>>()?;
            RollCallMatrix::new(doc.legislators, doc.motions, votes)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    Unanimous,
    AllMissing,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::Unanimous => "unanimous",
            DropReason::AllMissing => "all-missing",
        })
    }
}

/// Audit trail of a [`filter_matrix`] call.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    /// (id, participation fraction) of each removed legislator.
    pub dropped_legislators: Vec<(String, f64)>,
    pub dropped_motions: Vec<(String, DropReason)>,
    pub n_before: usize,
    pub n_after: usize,
    pub m_before: usize,
    pub m_after: usize,
}

impl FilterReport {
    pub fn is_empty(&self) -> bool {
        self.dropped_legislators.is_empty() && self.dropped_motions.is_empty()
    }

    pub fn unanimous_count(&self) -> usize {
        self.dropped_motions
            .iter()
            .filter(|(_, r)| *r == DropReason::Unanimous)
            .count()
    }
}

/// Removes low-participation legislators, then motions that are empty or
/// (optionally) unanimous among the remaining observed votes.
///
/// The pass is single-shot: legislators are filtered first against the full
/// motion set, then motions are judged on the surviving rows. Participation
/// is not re-evaluated after motions are dropped.
pub fn filter_matrix(
    matrix: &RollCallMatrix,
    min_participation: f64,
    drop_unanimous: bool,
) -> Result<(RollCallMatrix, FilterReport)> {
    if !(0.0..=1.0).contains(&min_participation) {
        return Err(Error::domain(format!(
            "min_participation must lie in [0, 1], got {min_participation}"
        )));
    }
    let (n, m) = (matrix.n(), matrix.m());
    let mut report = FilterReport {
        n_before: n,
        m_before: m,
        ..FilterReport::default()
    };

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let fraction = matrix.legislator_observed(i) as f64 / m as f64;
        if fraction < min_participation {
            report
                .dropped_legislators
                .push((matrix.legislators()[i].id.clone(), fraction));
        } else {
            rows.push(i);
        }
    }

    let mut cols = Vec::with_capacity(m);
    for j in 0..m {
        let (yea, nay) = rows.iter().fold((0, 0), |(y, n), &i| match matrix.vote(i, j) {
            Vote::Yea => (y + 1, n),
            Vote::Nay => (y, n + 1),
            Vote::Missing => (y, n),
        });
        let id = &matrix.motions()[j].id;
        if yea + nay == 0 {
            report.dropped_motions.push((id.clone(), DropReason::AllMissing));
        } else if drop_unanimous && (yea == 0 || nay == 0) {
            report.dropped_motions.push((id.clone(), DropReason::Unanimous));
        } else {
            cols.push(j);
        }
    }

    report.n_after = rows.len();
    report.m_after = cols.len();
    if rows.len() < 2 || cols.is_empty() {
        return Err(Error::DegenerateData(format!(
            "filtering leaves {} legislators and {} motions",
            rows.len(),
            cols.len()
        )));
    }
    log::info!(
        "filter: {}→{} legislators, {}→{} motions ({} unanimous)",
        n,
        rows.len(),
        m,
        cols.len(),
        report.unanimous_count()
    );
    Ok((matrix.select(&rows, &cols)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[i8]]) -> RollCallMatrix {
        let n = rows.len();
        let m = rows[0].len();
        RollCallMatrix::from_rows(
            (0..n).map(|i| LegislatorMeta::new(format!("L{i}"))).collect(),
            (0..m).map(|j| MotionMeta::new(format!("M{j}"))).collect(),
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| match v {
                            1 => Vote::Yea,
                            0 => Vote::Nay,
                            _ => Vote::Missing,
                        })
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn csv_with_na_cell() {
        let text = "legislator_id,party,group,M1,M2\nA,p,,1,0\nB,p,g,NA,1\nC,q,,0,\n";
        let mat = read_csv(text.as_bytes()).unwrap();
        assert_eq!((mat.n(), mat.m()), (3, 2));
        assert_eq!(mat.vote(1, 0), Vote::Missing);
        assert_eq!(mat.vote(2, 1), Vote::Missing);
        assert_eq!(mat.observed_count(), 4);
        assert_eq!(mat.legislators()[1].group.as_deref(), Some("g"));
        assert_eq!(mat.legislators()[0].group, None);
    }

    #[test]
    fn csv_duplicate_legislator_is_rejected() {
        let text = "legislator_id,party,group,M1\nA,p,,1\nA,p,,0\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn csv_ragged_row_is_rejected() {
        let text = "legislator_id,party,group,M1,M2\nA,p,,1,0\nB,p,,1\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn csv_bad_cell_reports_position() {
        let text = "legislator_id,party,group,M1,M2\nA,p,,1,0\nB,p,,1,yes\n";
        match read_csv(text.as_bytes()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_bad_header() {
        let text = "id,party,group,M1\nA,p,,1\n";
        assert!(matches!(
            read_csv(text.as_bytes()),
            Err(Error::Parse { line: 1, column: 1, .. })
        ));
    }

    #[test]
    fn json_nested_and_flat_votes() {
        let nested = r#"{"legislators":[{"id":"A","party":"x"},{"id":"B","party":"y","group":"gov"}],
            "motions":[{"id":"M1","sponsor_flag":true},{"id":"M2"}],
            "votes":[[1,null],[0,1]]}"#;
        let a = parse_json(nested).unwrap();
        assert_eq!(a.vote(0, 1), Vote::Missing);
        assert_eq!(a.motions()[0].sponsor_flag, Some(true));
        let flat = nested.replace("[[1,null],[0,1]]", "[1,null,0,1]");
        let b = parse_json(&flat).unwrap();
        assert_eq!(a.votes(), b.votes());
    }

    #[test]
    fn json_ragged_and_malformed() {
        let ragged = r#"{"legislators":[{"id":"A"},{"id":"B"}],"motions":[{"id":"M1"},{"id":"M2"}],
            "votes":[[1,0],[1]]}"#;
        assert!(matches!(parse_json(ragged), Err(Error::Validation(_))));
        assert!(matches!(parse_json("{\"legislators\": ["), Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let mat = matrix(&[&[1, 0, -1], &[0, 1, 1]]);
        let mut buf = Vec::new();
        mat.write_csv(&mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), mat);
        assert_eq!(parse_json(&mat.to_json()).unwrap(), mat);
    }

    #[test]
    fn filter_noop_on_clean_matrix() {
        let mat = matrix(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]);
        let (out, report) = filter_matrix(&mat, 0.95, true).unwrap();
        assert_eq!(out, mat);
        assert!(report.is_empty());
        assert_eq!((report.n_after, report.m_after), (3, 3));
    }

    #[test]
    fn filter_drops_unanimous_column() {
        let mat = matrix(&[&[1, 1, 0], &[0, 1, 1], &[1, -1, 0], &[0, 1, 1]]);
        let (out, report) = filter_matrix(&mat, 0.0, true).unwrap();
        assert_eq!(out.m(), 2);
        assert_eq!(report.dropped_motions, vec![("M1".to_string(), DropReason::Unanimous)]);
        // Unanimity disregarded when not requested.
        let (out, _) = filter_matrix(&mat, 0.0, false).unwrap();
        assert_eq!(out.m(), 3);
    }

    #[test]
    fn filter_drops_legislators_before_motions() {
        // L3 is the lone dissenter on M0 and participates in 2/4 motions.
        let mat = matrix(&[
            &[1, 1, 0, 1],
            &[1, 0, 1, 0],
            &[1, 1, 0, 1],
            &[0, -1, -1, 0],
        ]);
        let (out, report) = filter_matrix(&mat, 0.75, true).unwrap();
        assert_eq!(report.dropped_legislators, vec![("L3".to_string(), 0.5)]);
        assert_eq!(report.dropped_motions, vec![("M0".to_string(), DropReason::Unanimous)]);
        assert_eq!((out.n(), out.m()), (3, 3));
        assert_eq!(report.n_after, report.n_before - report.dropped_legislators.len());
        assert_eq!(report.m_after, report.m_before - report.dropped_motions.len());
    }

    #[test]
    fn filter_all_missing_column_always_dropped() {
        let mat = matrix(&[&[1, -1, 0], &[0, -1, 1]]);
        let (_, report) = filter_matrix(&mat, 0.0, false).unwrap();
        assert_eq!(report.dropped_motions, vec![("M1".to_string(), DropReason::AllMissing)]);
    }

    #[test]
    fn filter_degenerate_result() {
        let mat = matrix(&[&[1, 1], &[1, 1], &[1, 1]]);
        assert!(matches!(filter_matrix(&mat, 0.5, true), Err(Error::DegenerateData(_))));
        let mat = matrix(&[&[1, 0], &[-1, -1], &[-1, -1]]);
        assert!(matches!(filter_matrix(&mat, 0.5, false), Err(Error::DegenerateData(_))));
        assert!(matches!(filter_matrix(&mat, 1.5, false), Err(Error::Domain(_))));
    }

    #[test]
    fn participation_shift_breaks_idempotence() {
        // L2 votes on 3 of 4 motions (0.75) before the unanimous M0 goes,
        // then on 2 of 3 (0.67) after: a second pass drops it.
        let mat = matrix(&[
            &[1, 1, 0, 1],
            &[1, 0, 1, 0],
            &[1, 1, -1, 0],
            &[1, 0, 1, 1],
        ]);
        let (once, _) = filter_matrix(&mat, 0.75, true).unwrap();
        let (_, second) = filter_matrix(&once, 0.75, true).unwrap();
        assert_eq!(second.dropped_legislators.len(), 1);
    }
}
