//! Bitwise CRC over bit vectors.
//!
//! Bits are processed MSB-first with no reflection and no output XOR, so a
//! byte string is fed as its bits from the high bit of the first byte.

use crate::error::{Error, Result};

/// A non-reflected CRC of up to 32 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc {
    width: u8,
    poly: u32,
    init: u32,
}

impl Crc {
    /// No CRC at all; `compute` returns an empty vector.
    pub const NONE: Crc = Crc {
        width: 0,
        poly: 0,
        init: 0,
    };
    /// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF.
    pub const CCITT_FALSE: Crc = Crc {
        width: 16,
        poly: 0x1021,
        init: 0xFFFF,
    };
    /// CRC-16/XMODEM: poly 0x1021, zero init. Keeps the code linear.
    pub const XMODEM: Crc = Crc {
        width: 16,
        poly: 0x1021,
        init: 0,
    };
    /// 8-bit CRC with the 5G NR generator D^8+D^7+D^4+D^3+D+1.
    pub const CRC8: Crc = Crc {
        width: 8,
        poly: 0x9B,
        init: 0,
    };
    /// 24-bit CRC with the 5G NR "C" generator.
    pub const CRC24C: Crc = Crc {
        width: 24,
        poly: 0xB2_B117,
        init: 0,
    };

    pub fn new(width: u8, poly: u32, init: u32) -> Result<Self> {
        if width > 32 {
            return Err(Error::Unsupported(format!("CRC width {width} > 32")));
        }
        let mask = Self::mask_for(width);
        Ok(Crc {
            width,
            poly: poly & mask,
            init: init & mask,
        })
    }

    /// The default CRC for a given length.
    pub fn for_len(len: usize) -> Result<Self> {
        match len {
            0 => Ok(Crc::NONE),
            8 => Ok(Crc::CRC8),
            16 => Ok(Crc::CCITT_FALSE),
            24 => Ok(Crc::CRC24C),
            _ => Err(Error::Unsupported(format!("no default CRC of length {len}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.width as usize
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn init(&self) -> u32 {
        self.init
    }

    fn mask_for(width: u8) -> u32 {
        if width >= 32 {
            u32::MAX
        } else {
            (1u32 << width) - 1
        }
    }

    /// Register value after shifting in `bits`.
    pub fn register(&self, bits: &[u8]) -> u32 {
        if self.width == 0 {
            return 0;
        }
        let top = 1u32 << (self.width - 1);
        let mask = Self::mask_for(self.width);
        let mut reg = self.init;
        for &b in bits {
            let feedback = ((reg & top) != 0) ^ (b & 1 != 0);
            reg = (reg << 1) & mask;
            if feedback {
                reg ^= self.poly;
            }
        }
        reg
    }

    /// CRC remainder of `bits`, MSB first, `len()` bits long.
    pub fn compute(&self, bits: &[u8]) -> Vec<u8> {
        let reg = self.register(bits);
        (0..self.width).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }

    /// True iff the trailing `len()` bits equal the CRC of the leading bits.
    pub fn check(&self, bits: &[u8]) -> bool {
        let w = self.len();
        if bits.len() < w {
            return false;
        }
        let (data, tail) = bits.split_at(bits.len() - w);
        let reg = self.register(data);
        tail.iter()
            .enumerate()
            .all(|(i, &b)| ((reg >> (w - 1 - i)) & 1) as u8 == (b & 1))
    }
}

impl Default for Crc {
    fn default() -> Self {
        Crc::CCITT_FALSE
    }
}

/// Expands bytes into bits, MSB first.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1))
        .collect()
}

/// Packs MSB-first bits into an integer. Panics on more than 32 bits.
pub fn bits_to_u32(bits: &[u8]) -> u32 {
    assert!(bits.len() <= 32);
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | (b & 1) as u32)
}
