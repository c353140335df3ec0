use std::ops::Range;

use crate::model::DataInstance;

use super::{DataError, DataSchema};

/// Unparsed lines split off the source, ready to be parsed by a worker.
#[derive(Debug, Clone, Default)]
pub struct RawBatch {
    pub(crate) origin: u64,
    pub(crate) text: Vec<u8>,
    /// `(line number, byte range)` of each record inside `text`.
    pub(crate) records: Vec<(u64, Range<usize>)>,
}

impl RawBatch {
    pub fn origin(&self) -> u64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn parse(&self, schema: &DataSchema) -> Result<DataBatch, DataError> {
        let mut values = Vec::with_capacity(self.records.len() * schema.len());
        for (line, range) in &self.records {
            let text = std::str::from_utf8(&self.text[range.clone()]).map_err(|_| DataError::Parse {
                line: *line,
                message: "invalid UTF-8".into(),
            })?;
            schema.parse_record(text, *line, &mut values)?;
        }
        Ok(DataBatch {
            origin: self.origin,
            width: schema.len(),
            values,
        })
    }
}

/// Consecutive parsed records, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBatch {
    origin: u64,
    width: usize,
    values: Vec<f64>,
}

impl DataBatch {
    pub fn new(origin: u64, width: usize, values: Vec<f64>) -> Self {
        assert!(width > 0 && values.len() % width == 0, "ragged batch");
        DataBatch {
            origin,
            width,
            values,
        }
    }

    /// Ordinal of the first record in the file (0-based).
    pub fn origin(&self) -> u64 {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn instance(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_instances(&self) -> Vec<DataInstance> {
        self.iter().map(|x| DataInstance::new(x.to_vec())).collect()
    }
}
