//! Vector encodings of states, symbols and strings.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("index {index} does not fit in dimension {dim}")]
    OutOfRange { index: usize, dim: usize },
    #[error("index {index} does not fit in {bits} bits")]
    Overflow { index: usize, bits: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("string of length {length} does not fit in {max} blocks")]
    TooLong { length: usize, max: usize },
}

/// Standard basis vector `e_index` in `dim` dimensions.
pub fn one_hot(index: usize, dim: usize) -> Result<Vec<f64>, EncodingError> {
    if dim == 0 {
        return Err(EncodingError::ZeroDimension);
    }
    if index >= dim {
        return Err(EncodingError::OutOfRange { index, dim });
    }
    let mut v = vec![0.0; dim];
    v[index] = 1.0;
    Ok(v)
}

/// Little-endian base-2 digits of `index`, padded to `bits`.
pub fn binary_code(index: usize, bits: usize) -> Result<Vec<f64>, EncodingError> {
    if bits == 0 {
        return Err(EncodingError::ZeroDimension);
    }
    if bits < usize::BITS as usize && index >> bits != 0 {
        return Err(EncodingError::Overflow { index, bits });
    }
    Ok((0..bits)
        .map(|b| if b < usize::BITS as usize && (index >> b) & 1 == 1 { 1.0 } else { 0.0 })
        .collect())
}

/// Width of a binary state code: `ceil(log2 n)`, but never less than one wire.
pub fn code_width(state_count: usize) -> usize {
    let mut bits = 0;
    while bits < usize::BITS as usize && (1usize << bits) < state_count {
        bits += 1;
    }
    bits.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingKind {
    OneHot,
    Binary,
}

/// Table of state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEncoding {
    kind: EncodingKind,
    dim: usize,
    codes: Vec<Vec<f64>>,
}

impl StateEncoding {
    pub fn one_hot(state_count: usize) -> Result<Self, EncodingError> {
        let codes = (0..state_count)
            .map(|i| one_hot(i, state_count))
            .collect::<Result<_, _>>()?;
        Ok(Self { kind: EncodingKind::OneHot, dim: state_count, codes })
    }

    pub fn binary(state_count: usize) -> Result<Self, EncodingError> {
        if state_count == 0 {
            return Err(EncodingError::ZeroDimension);
        }
        let dim = code_width(state_count);
        let codes = (0..state_count)
            .map(|i| binary_code(i, dim))
            .collect::<Result<_, _>>()?;
        Ok(Self { kind: EncodingKind::Binary, dim, codes })
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state_count(&self) -> usize {
        self.codes.len()
    }

    pub fn code(&self, state: usize) -> Option<&[f64]> {
        self.codes.get(state).map(Vec::as_slice)
    }

    /// Inverse lookup; exact match only.
    pub fn decode(&self, vector: &[f64]) -> Option<usize> {
        self.codes.iter().position(|c| c.as_slice() == vector)
    }
}

/// Concatenated per-symbol blocks of a string.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedString {
    data: Vec<f64>,
    length: usize,
    alphabet_size: usize,
}

impl EncodedString {
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Number of blocks, padding included.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Argmax of each block; all-zero padding blocks decode to `None`.
    pub fn decode(&self) -> Vec<Option<usize>> {
        self.data
            .chunks(self.alphabet_size.max(1))
            .map(|block| {
                let mut best: Option<(usize, f64)> = None;
                for (j, &v) in block.iter().enumerate() {
                    if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
                        best = Some((j, v));
                    }
                }
                best.map(|(j, _)| j)
            })
            .collect()
    }
}

/// One-hot blocks for every symbol of `x`, concatenated.
pub fn encode_string(x: &[usize], alphabet_size: usize) -> Result<EncodedString, EncodingError> {
    let mut data = Vec::with_capacity(x.len() * alphabet_size);
    for &s in x {
        data.extend(one_hot(s, alphabet_size)?);
    }
    Ok(EncodedString { data, length: x.len(), alphabet_size })
}

/// Like [`encode_string`] but right-pads with all-zero blocks up to `length` blocks.
pub fn encode_zero_padded(
    x: &[usize],
    length: usize,
    alphabet_size: usize,
) -> Result<EncodedString, EncodingError> {
    if x.len() > length {
        return Err(EncodingError::TooLong { length: x.len(), max: length });
    }
    let mut encoded = encode_string(x, alphabet_size)?;
    encoded.data.resize(length * alphabet_size, 0.0);
    encoded.length = length;
    Ok(encoded)
}
