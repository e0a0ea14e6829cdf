//! Delimited dataset files: one campaign per row, fixed column names.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::domain::{
    CampaignRecord, Category, ControlVector, Dataset, Platform, QuestionId, Rating,
};
use crate::error::{Error, Result};

/// Leading columns, in the order files are written; `q01..q26` follow.
pub const DATASET_COLUMNS: [&str; 13] = [
    "id",
    "title",
    "platform",
    "category",
    "funding_raised",
    "goal",
    "characters",
    "figures",
    "tables",
    "videos",
    "rewards",
    "team_intro",
    "timeline",
];

pub fn dataset_header() -> Vec<String> {
    DATASET_COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(QuestionId::all().map(QuestionId::column_name))
        .collect()
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(file, &path.display().to_string())
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(dataset, file)
}

/// Parse a dataset. Columns may come in any order but every name must be known
/// and present; row numbers in errors count the header as row 1.
pub fn read_dataset(reader: impl Read, provenance: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(e.to_string()))?
        .clone();
    let expected = dataset_header();
    for h in header.iter() {
        if !expected.iter().any(|e| e == h) {
            return Err(Error::Parse {
                row: Some(1),
                column: Some(h.to_string()),
                message: "unknown column".into(),
            });
        }
    }
    let mut index = BTreeMap::new();
    for name in &expected {
        let positions: Vec<usize> = header
            .iter()
            .enumerate()
            .filter(|(_, h)| h == name)
            .map(|(i, _)| i)
            .collect();
        match positions.as_slice() {
            [i] => {
                index.insert(name.as_str(), *i);
            }
            [] => {
                return Err(Error::Parse {
                    row: Some(1),
                    column: Some(name.clone()),
                    message: "missing column".into(),
                })
            }
            _ => {
                return Err(Error::Parse {
                    row: Some(1),
                    column: Some(name.clone()),
                    message: "duplicate column".into(),
                })
            }
        }
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 2;
        let row = row.map_err(|e| Error::Parse {
            row: Some(row_no),
            column: None,
            message: e.to_string(),
        })?;
        let record = parse_record(row_no, &row, &index)?;
        record.validate().map_err(|e| at_row(e, row_no))?;
        records.push(record);
    }
    Dataset::new(records, provenance)
}

fn parse_record(
    row: usize,
    cells: &csv::StringRecord,
    index: &BTreeMap<&str, usize>,
) -> Result<CampaignRecord> {
    let cell = |name: &str| cells.get(index[name]).unwrap_or("");
    fn field<T: std::str::FromStr>(row: usize, column: &str, text: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        text.trim().parse::<T>().map_err(|e| Error::Parse {
            row: Some(row),
            column: Some(column.to_string()),
            message: format!("`{text}`: {e}"),
        })
    }
    let flag = |column: &str| -> Result<bool> {
        match cell(column).trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Error::Parse {
                row: Some(row),
                column: Some(column.to_string()),
                message: format!("`{other}` is not 0 or 1"),
            }),
        }
    };

    let mut ratings = BTreeMap::new();
    for q in QuestionId::all() {
        let column = q.column_name();
        let value: f64 = field(row, &column, cell(&column))?;
        let rating = Rating::from_score(value).map_err(|_| {
            Error::invariant(
                column.clone(),
                format!("row {row}: rating {value} is not one of 0, 0.5, 1"),
            )
        })?;
        ratings.insert(q, rating);
    }

    Ok(CampaignRecord {
        id: cell("id").to_string(),
        title: cell("title").to_string(),
        platform: field::<Platform>(row, "platform", cell("platform"))?,
        category: field::<Category>(row, "category", cell("category"))?,
        funding_raised: field(row, "funding_raised", cell("funding_raised"))?,
        controls: ControlVector {
            characters: field(row, "characters", cell("characters"))?,
            figures: field(row, "figures", cell("figures"))?,
            tables: field(row, "tables", cell("tables"))?,
            videos: field(row, "videos", cell("videos"))?,
            rewards: field(row, "rewards", cell("rewards"))?,
            team_intro: flag("team_intro")?,
            timeline: flag("timeline")?,
            goal: field(row, "goal", cell("goal"))?,
        },
        ratings,
    })
}

fn at_row(e: Error, row: usize) -> Error {
    match e {
        Error::InvalidControl { field, message } => {
            Error::invariant(field, format!("row {row}: {message}"))
        }
        Error::InvariantViolation { field, message } => {
            Error::invariant(field, format!("row {row}: {message}"))
        }
        other => other,
    }
}

pub fn write_dataset(dataset: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| Error::parse(e.to_string());
    w.write_record(dataset_header()).map_err(csv_err)?;
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    for r in dataset.records() {
        let c = &r.controls;
        let mut fields = vec![
            r.id.clone(),
            r.title.clone(),
            r.platform.code().to_string(),
            r.category.code().to_string(),
            r.funding_raised.to_string(),
            c.goal.to_string(),
            c.characters.to_string(),
            c.figures.to_string(),
            c.tables.to_string(),
            c.videos.to_string(),
            c.rewards.to_string(),
            flag(c.team_intro),
            flag(c.timeline),
        ];
        fields.extend(QuestionId::all().map(|q| r.rating(q).score().to_string()));
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn dataset_to_string(dataset: &Dataset) -> String {
    let mut buf = Vec::new();
    write_dataset(dataset, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, q05: &str) -> String {
        let mut cells: Vec<String> = [id, "Watch, v2", "KS", "SW", "2945885", "100000", "10000", "12", "1", "2", "9", "1", "0"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for q in 1..=26 {
            cells.push(if q == 5 { q05.to_string() } else if q % 3 == 0 { "0.5".into() } else { "1".into() });
        }
        cells
            .iter()
            .map(|c| if c.contains(',') { format!("\"{c}\"") } else { c.clone() })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn file(rows: &[String]) -> String {
        let mut s = dataset_header().join(",");
        s.push('\n');
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn two_rows_load_and_round_trip() {
        let text = file(&[line("a", "0"), line("b", "1")]);
        let ds = read_dataset(text.as_bytes(), "mem").unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records()[0].title, "Watch, v2");
        assert_eq!(ds.records()[0].funding_raised, 2_945_885.0);
        assert_eq!(dataset_to_string(&ds), text);
    }

    #[test]
    fn illegal_rating_names_column() {
        let text = file(&[line("a", "0.7")]);
        match read_dataset(text.as_bytes(), "mem") {
            Err(Error::InvariantViolation { field, message }) => {
                assert_eq!(field, "q05");
                assert!(message.contains("row 2"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_locus() {
        let text = file(&[line("a", "0")]).replace(",KS,", ",XX,");
        match read_dataset(text.as_bytes(), "mem") {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, Some(2));
                assert_eq!(column.as_deref(), Some("platform"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_columns() {
        let text = file(&[]).replace(",q26", "");
        assert!(matches!(read_dataset(text.as_bytes(), "mem"), Err(Error::Parse { column: Some(c), .. }) if c == "q26"));
        let text = file(&[]).replace("q26", "q27");
        assert!(matches!(read_dataset(text.as_bytes(), "mem"), Err(Error::Parse { column: Some(c), .. }) if c == "q27"));
    }

    #[test]
    fn zero_goal_is_an_invariant_violation() {
        let text = file(&[line("a", "0").replace(",100000,", ",0,")]);
        match read_dataset(text.as_bytes(), "mem") {
            Err(Error::InvariantViolation { field, .. }) => assert_eq!(field, "goal"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn header_only_is_an_empty_dataset() {
        let ds = read_dataset(file(&[]).as_bytes(), "mem").unwrap();
        assert!(ds.is_empty());
    }
}
