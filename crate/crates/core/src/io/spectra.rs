use crate::error::{Error, Result};
use crate::spectral::{Label, Source, SpectrumEntry, SpectrumSample};

const HEADER: [&str; 5] = ["hbar", "index", "energy", "multiplicity", "label"];

/// One CSV for any number of samples; rows of one ħ are contiguous and
/// indexed from 0 in increasing energy.
pub fn spectra_to_csv(samples: &[SpectrumSample]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory CSV write");
    for s in samples {
        for (idx, e) in s.entries.iter().enumerate() {
            let label = e.label.as_ref().map(|l| l.to_string()).unwrap_or_default();
            w.write_record([
                s.hbar.to_string(),
                idx.to_string(),
                e.energy.to_string(),
                e.multiplicity.to_string(),
                label,
            ])
            .expect("in-memory CSV write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8")
}

fn parse_f64(s: &str, field: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::validation(field.to_string(), format!("expected a finite number, found {s:?}")))
}

/// Parses spectra. The cutoff of each loaded sample is its top energy, the
/// highest level the file vouches for.
pub fn spectra_from_csv(text: &str) -> Result<Vec<SpectrumSample>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::validation("header", e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::validation("header", format!("expected {}", HEADER.join(","))));
    }
    let mut samples: Vec<SpectrumSample> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::validation(format!("line {line}"), e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |name: &str| format!("line {line}: {name}");
        let hbar = parse_f64(&rec[0], &field("hbar"))?;
        if hbar <= 0.0 {
            return Err(Error::validation(field("hbar"), "must be positive"));
        }
        let index: usize = rec[1]
            .parse()
            .map_err(|_| Error::validation(field("index"), format!("expected a non-negative integer, found {:?}", &rec[1])))?;
        let energy = parse_f64(&rec[2], &field("energy"))?;
        let multiplicity: u32 = rec[3]
            .parse()
            .ok()
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::validation(field("multiplicity"), format!("expected a positive integer, found {:?}", &rec[3])))?;
        let label = if rec[4].is_empty() {
            None
        } else {
            Some(Label::parse(&rec[4]).ok_or_else(|| Error::validation(field("label"), format!("malformed label {:?}", &rec[4])))?)
        };
        let new_sample = samples.last().is_none_or(|s| s.hbar != hbar);
        if new_sample {
            if samples.iter().any(|s| s.hbar == hbar) {
                return Err(Error::validation(field("hbar"), format!("rows for ħ = {hbar} are not contiguous")));
            }
            samples.push(SpectrumSample {
                hbar,
                e_cut: energy,
                entries: Vec::new(),
                source: Source::Numeric,
            });
        }
        let s = samples.last_mut().expect("a sample was just ensured");
        if index != s.entries.len() {
            return Err(Error::validation(field("index"), format!("expected index {}, found {index}", s.entries.len())));
        }
        if let Some(prev) = s.entries.last() {
            if energy <= prev.energy {
                return Err(Error::validation(
                    field("energy"),
                    format!("energies must be strictly increasing ({energy} after {})", prev.energy),
                ));
            }
        }
        if let Some(l) = &label {
            let members = l.members();
            if members.len() as u32 > multiplicity || members.iter().any(|k| k.len() != members[0].len()) {
                return Err(Error::validation(field("label"), "label does not fit the multiplicity"));
            }
        }
        s.e_cut = energy;
        s.entries.push(SpectrumEntry { energy, multiplicity, label });
    }
    if samples.is_empty() {
        return Err(Error::validation("rows", "no spectrum rows"));
    }
    for s in &samples {
        s.validate()?;
    }
    Ok(samples)
}
