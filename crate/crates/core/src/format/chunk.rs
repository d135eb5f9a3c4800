//! Amplitude output.
//!
//! Text: one line `<index> <re> <im>` per amplitude, ascending.
//! Binary: per chunk, little-endian `u64 start`, `u64 len`, then `len`
//! pairs of `f64` (re, im).

use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use super::{parse_f64, FormatError};
use crate::chunk::StateChunk;
use crate::executor::{ChunkSink, SinkResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ChunkFormat {
    #[default]
    Text,
    Binary,
}

pub fn write_chunk<W: Write>(
    chunk: &StateChunk,
    format: ChunkFormat,
    sink: &mut W,
) -> io::Result<()> {
    match format {
        ChunkFormat::Text => {
            for (index, amp) in chunk.indexed() {
                writeln!(sink, "{index} {} {}", amp.re, amp.im)?;
            }
        }
        ChunkFormat::Binary => {
            sink.write_all(&chunk.start.to_le_bytes())?;
            sink.write_all(&(chunk.amps.len() as u64).to_le_bytes())?;
            for amp in &chunk.amps {
                sink.write_all(&amp.re.to_le_bytes())?;
                sink.write_all(&amp.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Reads back everything written by [`write_chunk`]. Binary input yields one
/// chunk per record; text input yields one chunk per run of consecutive
/// indices.
pub fn read_chunks<R: BufRead>(
    mut source: R,
    format: ChunkFormat,
) -> Result<Vec<StateChunk>, FormatError> {
    match format {
        ChunkFormat::Binary => {
            let mut chunks = Vec::new();
            loop {
                let mut word = [0u8; 8];
                if source.fill_buf()?.is_empty() {
                    return Ok(chunks);
                }
                source.read_exact(&mut word)?;
                let start = u64::from_le_bytes(word);
                source.read_exact(&mut word)?;
                let len = u64::from_le_bytes(word);
                let mut amps = Vec::with_capacity(len.min(1 << 20) as usize);
                for _ in 0..len {
                    source.read_exact(&mut word)?;
                    let re = f64::from_le_bytes(word);
                    source.read_exact(&mut word)?;
                    let im = f64::from_le_bytes(word);
                    amps.push(Complex64::new(re, im));
                }
                chunks.push(StateChunk::new(start, amps));
            }
        }
        ChunkFormat::Text => {
            let mut chunks: Vec<StateChunk> = Vec::new();
            for (idx, line) in source.lines().enumerate() {
                let line_no = idx + 1;
                let line = line?;
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.is_empty() || tokens[0].starts_with('#') {
                    continue;
                }
                let [index, re, im] = tokens[..] else {
                    return Err(FormatError::syntax(line_no, "expected `<index> <re> <im>`"));
                };
                let index: u64 = index.parse().map_err(|_| {
                    FormatError::syntax(line_no, format!("malformed index {index:?}"))
                })?;
                let amp = Complex64::new(parse_f64(re, line_no)?, parse_f64(im, line_no)?);
                match chunks.last_mut() {
                    Some(last) if last.end() == index => last.amps.push(amp),
                    _ => chunks.push(StateChunk::new(index, vec![amp])),
                }
            }
            Ok(chunks)
        }
    }
}

/// Sink that writes each chunk it receives.
pub struct ChunkWriter<W: Write> {
    inner: W,
    format: ChunkFormat,
}

impl<W: Write> ChunkWriter<W> {
    pub fn new(inner: W, format: ChunkFormat) -> Self {
        ChunkWriter { inner, format }
    }

    pub fn into_inner(self) -> W {
        self.inner
    }

    pub fn get_mut(&mut self) -> &mut W {
        &mut self.inner
    }
}

impl<W: Write> ChunkSink for ChunkWriter<W> {
    fn accept(&mut self, chunk: &StateChunk) -> SinkResult {
        write_chunk(chunk, self.format, &mut self.inner)?;
        Ok(())
    }

    fn finish(&mut self) -> SinkResult {
        self.inner.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn text(chunk: &StateChunk) -> String {
        let mut buf = Vec::new();
        write_chunk(chunk, ChunkFormat::Text, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_amplitude_line() {
        assert_eq!(
            text(&StateChunk::new(5, vec![Complex64::new(1.0, 0.0)])),
            "5 1 0\n"
        );
    }

    #[test]
    fn binary_layout() {
        let chunk = StateChunk::new(2, vec![Complex64::new(0.5, -1.0)]);
        let mut buf = Vec::new();
        write_chunk(&chunk, ChunkFormat::Binary, &mut buf).unwrap();
        assert_eq!(buf.len(), 32);
        assert_eq!(&buf[0..8], &2u64.to_le_bytes());
        assert_eq!(&buf[8..16], &1u64.to_le_bytes());
        assert_eq!(&buf[16..24], &0.5f64.to_le_bytes());
        assert_eq!(&buf[24..32], &(-1.0f64).to_le_bytes());
    }

    #[test]
    fn truncated_binary_is_an_error() {
        let chunk = StateChunk::new(0, vec![Complex64::new(1.0, 2.0); 3]);
        let mut buf = Vec::new();
        write_chunk(&chunk, ChunkFormat::Binary, &mut buf).unwrap();
        buf.truncate(buf.len() - 4);
        assert!(read_chunks(&buf[..], ChunkFormat::Binary).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            Just(-0.0),
            Just(0.0)
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            start in 0u64..1 << 40,
            parts in prop::collection::vec((finite(), finite()), 1..40),
        ) {
            let chunk = StateChunk::new(start, parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect());
            for format in [ChunkFormat::Text, ChunkFormat::Binary] {
                let mut buf = Vec::new();
                write_chunk(&chunk, format, &mut buf).unwrap();
                let back = read_chunks(&buf[..], format).unwrap();
                prop_assert_eq!(back.len(), 1);
                prop_assert_eq!(back[0].start, chunk.start);
                for (a, b) in back[0].amps.iter().zip(&chunk.amps) {
                    prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                    prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
                }
            }
        }
    }
}
