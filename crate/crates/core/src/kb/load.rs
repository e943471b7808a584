use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use super::{City, Domain, KbError, KbParts, KnowledgeBase, Poi, RejectionReport, Sourced, TransportLink, WeatherRecord};
use crate::canonical;

/// File names of a knowledge-base directory, one per domain.
pub const KB_FILES: [&str; 6] = [
    "cities.jsonl",
    "attractions.jsonl",
    "restaurants.jsonl",
    "hotels.jsonl",
    "transport.jsonl",
    "weather.jsonl",
];

/// Per-domain record streams. Each stream holds one JSON object per line.
#[derive(Default)]
pub struct KbSources<'a> {
    streams: Vec<(Domain, String, Box<dyn Read + 'a>)>,
}

impl<'a> KbSources<'a> {
    pub fn new() -> Self {
        KbSources { streams: Vec::new() }
    }

    pub fn with(mut self, domain: Domain, reader: impl Read + 'a) -> Self {
        self.streams.push((domain, domain.file_name().to_string(), Box::new(reader)));
        self
    }

    pub fn with_text(self, domain: Domain, text: &'a str) -> Self {
        self.with(domain, text.as_bytes())
    }

    fn with_named(mut self, domain: Domain, name: String, reader: impl Read + 'a) -> Self {
        self.streams.push((domain, name, Box::new(reader)));
        self
    }
}

/// Parse record streams and build a knowledge base. Records with missing
/// key fields, invalid values or dangling references are dropped and
/// reported; only an unreadable stream is an error.
pub fn load_kb(sources: KbSources<'_>) -> Result<(KnowledgeBase, RejectionReport), KbError> {
    let mut parts = KbParts::default();
    let mut report = RejectionReport::default();
    for (domain, name, reader) in sources.streams {
        let reader = BufReader::new(reader);
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let text = line.map_err(|error| KbError::Unreadable { source_name: name.clone(), error })?;
            if text.trim().is_empty() {
                continue;
            }
            match parse_record(domain, &text) {
                Ok(Parsed::City(c)) => parts.cities.push(Sourced { line: line_no, record: c }),
                Ok(Parsed::Poi(p)) => parts.pois.push((domain, Sourced { line: line_no, record: p })),
                Ok(Parsed::Link(l)) => parts.links.push(Sourced { line: line_no, record: l }),
                Ok(Parsed::Weather(w)) => parts.weather.push(Sourced { line: line_no, record: w }),
                Err((id, reason)) => report.reject(domain, line_no, id, reason),
            }
        }
    }
    let (kb, build_report) = KnowledgeBase::build(parts);
    report.rejected.extend(build_report.rejected);
    report.repaired.extend(build_report.repaired);
    Ok((kb, report))
}

/// Load the six domain files from a directory. Missing files count as
/// empty streams; an unreadable file or directory is fatal.
pub fn load_kb_dir(dir: &Path) -> Result<(KnowledgeBase, RejectionReport), KbError> {
    if !dir.is_dir() {
        return Err(KbError::Unreadable {
            source_name: dir.display().to_string(),
            error: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut sources = KbSources::new();
    for domain in Domain::ALL {
        let path = dir.join(domain.file_name());
        if !path.exists() {
            continue;
        }
        let file = fs::File::open(&path).map_err(|error| KbError::Unreadable { source_name: path.display().to_string(), error })?;
        sources = sources.with_named(domain, path.display().to_string(), file);
    }
    load_kb(sources)
}

/// Serialize a knowledge base as one JSONL file per domain.
pub fn write_kb_dir(kb: &KnowledgeBase, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for (domain, text) in serialize_domains(kb) {
        fs::write(dir.join(domain.file_name()), text)?;
    }
    Ok(())
}

/// Canonical JSONL text of every domain, in [`Domain::ALL`] order.
pub(crate) fn serialize_domains(kb: &KnowledgeBase) -> Vec<(Domain, String)> {
    fn lines<'a, T: serde::Serialize + 'a>(items: impl Iterator<Item = &'a T>) -> String {
        items.map(|i| canonical::to_line(i) + "\n").collect()
    }
    Domain::ALL
        .iter()
        .map(|&domain| {
            let text = match domain {
                Domain::Cities => lines(kb.cities()),
                Domain::Transport => lines(kb.links()),
                Domain::Weather => lines(kb.weather_records()),
                poi_domain => {
                    let kind = poi_domain.poi_kind();
                    lines(kb.pois().filter(|p| Some(p.kind()) == kind))
                }
            };
            (domain, text)
        })
        .collect()
}

enum Parsed {
    City(City),
    Poi(Poi),
    Link(TransportLink),
    Weather(WeatherRecord),
}

type RecordError = (Option<String>, String);

fn parse_record(domain: Domain, text: &str) -> Result<Parsed, RecordError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| (None, format!("malformed record: {e}")))?;
    let Some(obj) = value.as_object_mut() else {
        return Err((None, "malformed record: not a JSON object".into()));
    };
    let id = obj.get("id").and_then(Value::as_str).map(str::to_string);
    let missing = |field: &str| (id.clone(), format!("missing key field: {field}"));

    match domain {
        Domain::Cities => {
            for field in ["id", "name", "coords"] {
                if is_blank(obj.get(field)) {
                    return Err(missing(field));
                }
            }
            typed(value, &id).map(Parsed::City)
        }
        Domain::Transport => {
            if is_blank(obj.get("id")) {
                return Err(missing("id"));
            }
            typed(value, &id).map(Parsed::Link)
        }
        Domain::Weather => {
            let key = match (obj.get("city_id").and_then(Value::as_str), obj.get("date").and_then(Value::as_str)) {
                (Some(c), Some(d)) => Some(format!("{c}@{d}")),
                _ => None,
            };
            typed(value, &key).map(Parsed::Weather)
        }
        poi_domain => {
            for field in ["id", "name", "coords", "open_window"] {
                if is_blank(obj.get(field)) {
                    return Err(missing(field));
                }
            }
            let kind = poi_domain.poi_kind().expect("poi domain");
            obj.insert("kind".into(), Value::String(kind.as_str().into()));
            typed(value, &id).map(Parsed::Poi)
        }
    }
}

fn is_blank(v: Option<&Value>) -> bool {
    match v {
        None | Some(Value::Null) => true,
        Some(Value::String(s)) => s.trim().is_empty(),
        _ => false,
    }
}

fn typed<T: DeserializeOwned>(value: Value, id: &Option<String>) -> Result<T, RecordError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        (id.clone(), format!("invalid field `{path}`: {}", e.into_inner()))
    })
}
