//! LZ78 phrase parsing with a fixed, implementation-independent size rule.
//!
//! The dictionary starts with the empty phrase at index 0. Each step extends
//! the longest known phrase by one byte, emits `(phrase index, byte)` and adds
//! the extended phrase. If the input ends inside a known phrase, that phrase
//! is emitted as `(parent index, last byte)`.
//!
//! Token `t` (0-based) is written with `ceil(log2(t + 1))` index bits followed
//! by 8 literal bits, so a blob of `T` tokens occupies
//! `sum_{t<T} (ceil(log2(t + 1)) + 8)` bits. [`CompressedBlob::to_bits`]
//! produces exactly that layout, MSB first.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub index: u32,
    pub byte: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlob {
    pub tokens: Vec<Token>,
    pub bit_size: u64,
}

/// `ceil(log2(n))` with `ceil(log2(1)) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        u64::BITS - (n - 1).leading_zeros()
    }
}

/// Width in bits of the `position`-th token (dictionary holds `position + 1` phrases).
pub fn token_width(position: usize) -> u32 {
    ceil_log2(position as u64 + 1) + 8
}

fn total_bits(tokens: usize) -> u64 {
    (0..tokens).map(|t| u64::from(token_width(t))).sum()
}

/// Size in bits of the LZ78 encoding of `input`, without keeping the tokens.
pub fn lz_bit_size(input: &[u8]) -> u64 {
    let mut parser = Parser::with_capacity(input.len());
    let mut count = 0usize;
    let mut bits = 0u64;
    parser.parse(input, |_| {
        bits += u64::from(token_width(count));
        count += 1;
    });
    bits
}

pub fn lz_compress(input: &[u8]) -> CompressedBlob {
    let mut parser = Parser::with_capacity(input.len());
    let mut tokens = Vec::new();
    parser.parse(input, |t| tokens.push(t));
    let bit_size = total_bits(tokens.len());
    CompressedBlob { tokens, bit_size }
}

pub fn lz_decompress(blob: &CompressedBlob) -> Result<Vec<u8>> {
    // phrase i is (parent, last byte); phrase 0 is empty
    let mut phrases: Vec<(u32, u8)> = Vec::with_capacity(blob.tokens.len() + 1);
    phrases.push((0, 0));
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    for (position, token) in blob.tokens.iter().enumerate() {
        if token.index as usize >= phrases.len() {
            return Err(Error::MalformedToken {
                position,
                index: token.index,
                dict_size: phrases.len(),
            });
        }
        scratch.clear();
        let mut node = token.index;
        while node != 0 {
            let (parent, byte) = phrases[node as usize];
            scratch.push(byte);
            node = parent;
        }
        out.extend(scratch.iter().rev());
        out.push(token.byte);
        phrases.push((token.index, token.byte));
    }
    Ok(out)
}

struct Parser {
    children: HashMap<(u32, u8), u32>,
    phrases: Vec<(u32, u8)>,
}

impl Parser {
    fn with_capacity(n: usize) -> Self {
        // LZ78 emits O(n / log n) phrases; a quarter of n is ample headroom here.
        let cap = n / 4 + 1;
        let mut phrases = Vec::with_capacity(cap);
        phrases.push((0, 0));
        Self {
            children: HashMap::with_capacity(cap),
            phrases,
        }
    }

    fn parse(&mut self, input: &[u8], mut emit: impl FnMut(Token)) {
        let mut node = 0u32;
        for &byte in input {
            match self.children.get(&(node, byte)) {
                Some(&child) => node = child,
                None => {
                    emit(Token { index: node, byte });
                    let id = self.phrases.len() as u32;
                    self.children.insert((node, byte), id);
                    self.phrases.push((node, byte));
                    node = 0;
                }
            }
        }
        if node != 0 {
            let (parent, byte) = self.phrases[node as usize];
            emit(Token {
                index: parent,
                byte,
            });
        }
    }
}

impl CompressedBlob {
    /// Packs the tokens MSB-first; the result has `ceil(bit_size / 8)` bytes.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut w = BitWriter::default();
        for (t, token) in self.tokens.iter().enumerate() {
            w.put(u64::from(token.index), token_width(t) - 8);
            w.put(u64::from(token.byte), 8);
        }
        w.finish()
    }

    /// Inverse of [`to_bits`](Self::to_bits). Trailing padding is always
    /// shorter than the narrowest token, so no length prefix is needed.
    pub fn from_bits(bytes: &[u8]) -> Result<Self> {
        let total = bytes.len() as u64 * 8;
        let mut r = BitReader { bytes, pos: 0 };
        let mut tokens = Vec::new();
        loop {
            let width = token_width(tokens.len());
            if total - r.pos < u64::from(width) {
                break;
            }
            let index = r.get(width - 8) as u32;
            let byte = r.get(8) as u8;
            if index as usize > tokens.len() {
                return Err(Error::MalformedToken {
                    position: tokens.len(),
                    index,
                    dict_size: tokens.len() + 1,
                });
            }
            tokens.push(Token { index, byte });
        }
        let bit_size = total_bits(tokens.len());
        Ok(Self { tokens, bit_size })
    }

    /// One token per line as `index,byte-hex`.
    pub fn dump(&self) -> String {
        let mut s = String::with_capacity(self.tokens.len() * 8);
        for t in &self.tokens {
            let _ = writeln!(s, "{},{:02x}", t.index, t.byte);
        }
        s
    }
}

#[derive(Default)]
struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    fn put(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.acc = (self.acc << 1) | ((value >> i) & 1);
            self.filled += 1;
            if self.filled == 8 {
                self.out.push(self.acc as u8);
                self.acc = 0;
                self.filled = 0;
            }
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
        self.out
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl BitReader<'_> {
    fn get(&mut self, width: u32) -> u64 {
        let mut v = 0u64;
        for _ in 0..width {
            let byte = self.bytes[(self.pos / 8) as usize];
            let bit = (byte >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | u64::from(bit);
            self.pos += 1;
        }
        v
    }
}
