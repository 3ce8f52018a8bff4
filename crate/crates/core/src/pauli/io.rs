//! JSON documents for spectra. Floats are written in shortest round-trip
//! form, so reading back gives bit-identical coefficients.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::boolean::{BooleanSpectrum, Coeff, Subset};
use super::operator::OperatorSpectrum;
use super::string::{bits_from_str, PauliString};
use super::superop::{ChannelFlag, SuperopSpectrum};
use crate::{Error, Result, C64};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Operator,
    Superop,
    Boolean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keys: Option<[String; 2]>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub version: u32,
    pub kind: SpectrumKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelFlag>,
    pub entries: Vec<Entry>,
}

impl SpectrumDocument {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(s)?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn expect_kind(&self, kind: SpectrumKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Format(format!("expected a {kind:?} document, found {:?}", self.kind)));
        }
        Ok(())
    }
}

fn key_of(e: &Entry) -> Result<&str> {
    e.key.as_deref().ok_or_else(|| Error::Format("entry without key".into()))
}

fn check_len(s: &str, n: usize) -> Result<()> {
    if s.len() != n {
        return Err(Error::Format(format!("key {s} has length {} but n = {n}", s.len())));
    }
    Ok(())
}

/// Conversion to and from [`SpectrumDocument`].
pub trait SpectrumIo: Sized {
    fn to_document(&self) -> SpectrumDocument;
    fn from_document(doc: &SpectrumDocument) -> Result<Self>;

    fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_document().write(path)
    }

    fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_document(&SpectrumDocument::read(path)?)
    }
}

impl SpectrumIo for OperatorSpectrum {
    fn to_document(&self) -> SpectrumDocument {
        SpectrumDocument {
            version: FORMAT_VERSION,
            kind: SpectrumKind::Operator,
            n: self.n(),
            channel: None,
            entries: self
                .iter()
                .map(|(x, c)| Entry {
                    key: Some(x.to_string()),
                    keys: None,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    fn from_document(doc: &SpectrumDocument) -> Result<Self> {
        doc.expect_kind(SpectrumKind::Operator)?;
        let entries = doc
            .entries
            .iter()
            .map(|e| {
                let k = key_of(e)?;
                check_len(k, doc.n)?;
                Ok((k.parse::<PauliString>()?, C64::new(e.re, e.im)))
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorSpectrum::new(doc.n, entries)
    }
}

impl SpectrumIo for SuperopSpectrum {
    fn to_document(&self) -> SpectrumDocument {
        SpectrumDocument {
            version: FORMAT_VERSION,
            kind: SpectrumKind::Superop,
            n: self.n(),
            channel: Some(self.channel_flag()),
            entries: self
                .iter()
                .map(|((x, y), c)| Entry {
                    key: None,
                    keys: Some([x.to_string(), y.to_string()]),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    fn from_document(doc: &SpectrumDocument) -> Result<Self> {
        doc.expect_kind(SpectrumKind::Superop)?;
        let entries = doc
            .entries
            .iter()
            .map(|e| {
                let [x, y] = e
                    .keys
                    .as_ref()
                    .ok_or_else(|| Error::Format("superop entry without keys".into()))?;
                check_len(x, doc.n)?;
                check_len(y, doc.n)?;
                Ok(((x.parse()?, y.parse()?), C64::new(e.re, e.im)))
            })
            .collect::<Result<Vec<_>>>()?;
        SuperopSpectrum::new(doc.n, entries, doc.channel.unwrap_or(ChannelFlag::Unknown))
    }
}

impl<T: Coeff> SpectrumIo for BooleanSpectrum<T> {
    fn to_document(&self) -> SpectrumDocument {
        SpectrumDocument {
            version: FORMAT_VERSION,
            kind: SpectrumKind::Boolean,
            n: self.n(),
            channel: None,
            entries: self
                .iter()
                .map(|(s, c)| {
                    let z = c.to_c64();
                    Entry {
                        key: Some(s.to_digits(self.n())),
                        keys: None,
                        re: z.re,
                        im: z.im,
                    }
                })
                .collect(),
        }
    }

    fn from_document(doc: &SpectrumDocument) -> Result<Self> {
        doc.expect_kind(SpectrumKind::Boolean)?;
        let entries = doc
            .entries
            .iter()
            .map(|e| {
                let k = key_of(e)?;
                check_len(k, doc.n)?;
                Ok((Subset(bits_from_str(k)?), T::from_c64(C64::new(e.re, e.im))?))
            })
            .collect::<Result<Vec<_>>>()?;
        BooleanSpectrum::new(doc.n, entries)
    }
}
