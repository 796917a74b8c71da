use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{Dataset, Label, SampleRecord, N_FEATURES};
use crate::error::{Error, Result};

/// Text layout of a heart-disease file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// Whitespace-separated, class token 1 (absent) or 2 (present), no missing values.
    Statlog,
    /// Comma-separated, `?` marks a missing value, class 0 (absent) or 1..=4 (present).
    Cleveland,
}

impl Dialect {
    /// Cleveland when the first non-blank line contains a comma, else Statlog.
    pub fn detect(text: &str) -> Dialect {
        match text.lines().find(|l| !l.trim().is_empty()) {
            Some(l) if l.contains(',') => Dialect::Cleveland,
            _ => Dialect::Statlog,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Statlog => "statlog",
            Dialect::Cleveland => "cleveland",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "statlog" => Ok(Dialect::Statlog),
            "cleveland" => Ok(Dialect::Cleveland),
            other => Err(Error::Config(format!("unknown dialect `{other}`"))),
        }
    }
}

pub fn parse_dataset(path: impl AsRef<Path>, dialect: Dialect) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_str(&String::from_utf8_lossy(&bytes), dialect)
}

/// Parses a whole file body. Blank lines are ignored; every other line must
/// yield a record or the first error, located by its 1-based line number.
pub fn parse_str(text: &str, dialect: Dialect) -> Result<Dataset> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_record_line(line, dialect, i + 1)?);
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset::new(records))
}

pub fn parse_record_line(line: &str, dialect: Dialect, line_no: usize) -> Result<SampleRecord> {
    let tokens: Vec<&str> = match dialect {
        Dialect::Statlog => line.split_whitespace().collect(),
        Dialect::Cleveland => line.trim().split(',').map(str::trim).collect(),
    };
    if tokens.len() != N_FEATURES + 1 {
        return Err(Error::MalformedRow {
            line: line_no,
            reason: format!("expected {} fields, found {}", N_FEATURES + 1, tokens.len()),
        });
    }

    let mut features = [None; N_FEATURES];
    for (column, (slot, token)) in features.iter_mut().zip(&tokens).enumerate() {
        *slot = match (dialect, *token) {
            (Dialect::Cleveland, "?") => None,
            (_, token) => Some(parse_number(token).ok_or_else(|| Error::MalformedRow {
                line: line_no,
                reason: format!("column {}: cannot parse `{token}`", column + 1),
            })?),
        };
    }

    let label_token = tokens[N_FEATURES];
    let unknown = || Error::UnknownLabel {
        line: line_no,
        token: label_token.to_string(),
    };
    let code = parse_number(label_token).ok_or_else(unknown)?;
    let label = match dialect {
        Dialect::Statlog if code == 1.0 => Label::Absent,
        Dialect::Statlog if code == 2.0 => Label::Present,
        Dialect::Cleveland if code == 0.0 => Label::Absent,
        Dialect::Cleveland if [1.0, 2.0, 3.0, 4.0].contains(&code) => Label::Present,
        _ => return Err(unknown()),
    };

    Ok(SampleRecord { features, label })
}

/// Parses 13 comma-separated feature values, `?` for missing.
pub fn parse_feature_list(text: &str) -> Result<[Option<f64>; N_FEATURES]> {
    let tokens: Vec<&str> = text.trim().split(',').map(str::trim).collect();
    if tokens.len() != N_FEATURES {
        return Err(Error::ArityMismatch {
            expected: N_FEATURES,
            found: tokens.len(),
        });
    }
    let mut out = [None; N_FEATURES];
    for (column, (slot, token)) in out.iter_mut().zip(&tokens).enumerate() {
        if *token != "?" {
            *slot = Some(parse_number(token).ok_or_else(|| Error::MalformedRow {
                line: 1,
                reason: format!("column {}: cannot parse `{token}`", column + 1),
            })?);
        }
    }
    Ok(out)
}

fn parse_number(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dialect_detection() {
        assert_eq!(
            Dialect::detect("\n63.0,1.0,1.0,145.0\n"),
            Dialect::Cleveland
        );
        assert_eq!(Dialect::detect("70.0 1.0 4.0 130.0"), Dialect::Statlog);
        assert_eq!(Dialect::detect(""), Dialect::Statlog);
    }

    // First rows of the public Statlog (heart.dat) and processed Cleveland files.
    const STATLOG_ROW: &str = "70.0 1.0 4.0 130.0 322.0 0.0 2.0 109.0 0.0 2.4 2.0 3.0 3.0 2";
    const STATLOG_ROW_ABSENT: &str = "67.0 0.0 3.0 115.0 564.0 0.0 2.0 160.0 0.0 1.6 2.0 0.0 7.0 1";
    const CLEVELAND_MISSING_CA: &str = "38.0,1.0,3.0,138.0,175.0,0.0,0.0,173.0,0.0,0.0,1.0,?,3.0,0";

    #[test]
    fn statlog_class_two_is_presence() {
        let r = parse_record_line(STATLOG_ROW, Dialect::Statlog, 1).unwrap();
        assert_eq!(r.label, Label::Present);
        assert_eq!(r.features[0], Some(70.0));
        assert_eq!(r.features[12], Some(3.0));
        let r = parse_record_line(STATLOG_ROW_ABSENT, Dialect::Statlog, 2).unwrap();
        assert_eq!(r.label, Label::Absent);
    }

    #[test]
    fn cleveland_question_mark_is_missing() {
        let r = parse_record_line(CLEVELAND_MISSING_CA, Dialect::Cleveland, 1).unwrap();
        assert_eq!(r.features[11], None);
        assert_eq!(r.features.iter().filter(|v| v.is_none()).count(), 1);
        assert_eq!(r.label, Label::Absent);
    }

    #[test]
    fn cleveland_severity_levels_collapse_to_presence() {
        for level in 1..=4 {
            let line =
                format!("63.0,1.0,1.0,145.0,233.0,1.0,2.0,150.0,0.0,2.3,3.0,0.0,6.0,{level}");
            let r = parse_record_line(&line, Dialect::Cleveland, 1).unwrap();
            assert_eq!(r.label, Label::Present);
        }
    }

    #[test]
    fn empty_input_is_empty_dataset() {
        assert!(matches!(
            parse_str("", Dialect::Statlog),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            parse_str("\n  \n", Dialect::Cleveland),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn wrong_arity_reports_line() {
        let text = format!("{STATLOG_ROW}\n\n1 2 3\n");
        match parse_str(&text, Dialect::Statlog) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unparseable_token_is_malformed() {
        let line = STATLOG_ROW.replace("322.0", "abc");
        assert!(matches!(
            parse_record_line(&line, Dialect::Statlog, 7),
            Err(Error::MalformedRow { line: 7, .. })
        ));
        // `?` is only a missing marker in the Cleveland dialect.
        let line = STATLOG_ROW.replace("322.0", "?");
        assert!(parse_record_line(&line, Dialect::Statlog, 1).is_err());
        let line = STATLOG_ROW.replace("322.0", "nan");
        assert!(parse_record_line(&line, Dialect::Statlog, 1).is_err());
    }

    #[test]
    fn out_of_range_labels_are_rejected() {
        let line = STATLOG_ROW
            .rsplit_once(' ')
            .map(|(head, _)| format!("{head} 3"))
            .unwrap();
        assert!(matches!(
            parse_record_line(&line, Dialect::Statlog, 1),
            Err(Error::UnknownLabel { .. })
        ));
        let line = CLEVELAND_MISSING_CA
            .rsplit_once(',')
            .map(|(h, _)| format!("{h},5"))
            .unwrap();
        assert!(matches!(
            parse_record_line(&line, Dialect::Cleveland, 1),
            Err(Error::UnknownLabel { .. })
        ));
        let line = CLEVELAND_MISSING_CA
            .rsplit_once(',')
            .map(|(h, _)| format!("{h},?"))
            .unwrap();
        assert!(matches!(
            parse_record_line(&line, Dialect::Cleveland, 1),
            Err(Error::UnknownLabel { .. })
        ));
    }

    #[test]
    fn feature_list_accepts_missing_markers() {
        let v = parse_feature_list("63,1,1,145,233,1,2,150,0,2.3,3,?,6").unwrap();
        assert_eq!(v[11], None);
        assert_eq!(v[9], Some(2.3));
        assert!(matches!(
            parse_feature_list("1,2,3"),
            Err(Error::ArityMismatch {
                expected: 13,
                found: 3
            })
        ));
    }
}
