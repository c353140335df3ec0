use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::model::DataInstance;

use super::{DataBatch, DataError, DataSchema, RawBatch};

pub const DEFAULT_BATCH_SIZE: usize = 1000;

/// Sequential reader over a dataset that hands out fixed-size batches.
///
/// The cursor is only ever advanced through `&mut self`; concurrent batch
/// processing goes through [`super::fold_batches`], which serializes access.
#[derive(Debug)]
pub struct BatchSource<R = BufReader<File>> {
    schema: DataSchema,
    reader: R,
    batch_size: usize,
    next_ordinal: u64,
    /// Number of the last line read; the header is line 1.
    line: u64,
    exhausted: bool,
}

/// Opens a dataset file and reads its header.
pub fn open_dataset(path: impl AsRef<Path>, batch_size: usize) -> Result<BatchSource, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    BatchSource::from_reader(BufReader::with_capacity(1 << 16, file), batch_size)
}

/// Reads every remaining record into one batch.
pub fn read_all<R: BufRead>(source: &mut BatchSource<R>) -> Result<DataBatch, DataError> {
    let mut values = Vec::new();
    let width = source.schema().len();
    let origin = source.next_ordinal;
    while let Some(batch) = source.try_split()? {
        values.extend_from_slice(batch.values());
    }
    Ok(DataBatch::new(origin, width, values))
}

impl<R: BufRead> BatchSource<R> {
    pub fn from_reader(mut reader: R, batch_size: usize) -> Result<Self, DataError> {
        if batch_size == 0 {
            return Err(DataError::ZeroBatchSize);
        }
        let mut header = String::new();
        if reader.read_line(&mut header)? == 0 {
            return Err(DataError::Header("missing header line".into()));
        }
        let schema = DataSchema::parse_header(&header)?;
        Ok(BatchSource {
            schema,
            reader,
            batch_size,
            next_ordinal: 0,
            line: 1,
            exhausted: false,
        })
    }

    pub fn schema(&self) -> &DataSchema {
        &self.schema
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn set_batch_size(&mut self, batch_size: usize) -> Result<(), DataError> {
        if batch_size == 0 {
            return Err(DataError::ZeroBatchSize);
        }
        self.batch_size = batch_size;
        Ok(())
    }

    /// Records consumed so far.
    pub fn records_read(&self) -> u64 {
        self.next_ordinal
    }

    /// Appends the next non-blank line to `text`, returning its line number
    /// and byte range without the line terminator.
    fn next_line(&mut self, text: &mut Vec<u8>) -> Result<Option<(u64, std::ops::Range<usize>)>, DataError> {
        if self.exhausted {
            return Ok(None);
        }
        loop {
            let start = text.len();
            if self.reader.read_until(b'\n', text)? == 0 {
                self.exhausted = true;
                return Ok(None);
            }
            self.line += 1;
            let mut end = text.len();
            while end > start && matches!(text[end - 1], b'\n' | b'\r') {
                end -= 1;
            }
            if text[start..end].iter().all(u8::is_ascii_whitespace) {
                text.truncate(start);
                continue;
            }
            return Ok(Some((self.line, start..end)));
        }
    }

    /// Reads one record and hands it to `action`. Returns `false` at end of
    /// file without calling `action`.
    pub fn try_advance(&mut self, action: impl FnOnce(DataInstance)) -> Result<bool, DataError> {
        let mut text = Vec::new();
        let Some((line, range)) = self.next_line(&mut text)? else {
            return Ok(false);
        };
        let record = std::str::from_utf8(&text[range]).map_err(|_| DataError::Parse {
            line,
            message: "invalid UTF-8".into(),
        })?;
        let mut values = Vec::with_capacity(self.schema.len());
        self.schema.parse_record(record, line, &mut values)?;
        self.next_ordinal += 1;
        action(DataInstance::new(values));
        Ok(true)
    }

    /// Splits off up to `batch_size` consecutive records without parsing them.
    pub fn split_raw(&mut self) -> Result<Option<RawBatch>, DataError> {
        let mut batch = RawBatch {
            origin: self.next_ordinal,
            ..RawBatch::default()
        };
        while batch.records.len() < self.batch_size {
            match self.next_line(&mut batch.text)? {
                Some(record) => batch.records.push(record),
                None => break,
            }
        }
        if batch.records.is_empty() {
            return Ok(None);
        }
        self.next_ordinal += batch.records.len() as u64;
        Ok(Some(batch))
    }

    /// Splits off and parses the next batch; `None` at end of file.
    pub fn try_split(&mut self) -> Result<Option<DataBatch>, DataError> {
        match self.split_raw()? {
            Some(raw) => raw.parse(&self.schema).map(Some),
            None => Ok(None),
        }
    }
}
