use std::fmt;

/// Padding symbol `⋄`.
pub const PAD: u8 = 0xFF;

/// Maximum number of tracks a letter can carry.
pub const MAX_TRACKS: usize = 16;

/// One letter of the k-track alphabet: a tuple of symbols, one byte per track.
///
/// Track 0 sits in the most significant byte, so the integer order of letters
/// is the lexicographic order of their tuples with `⋄` last.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Letter(pub u128);

impl Letter {
    #[inline]
    fn shift(track: usize) -> u32 {
        ((MAX_TRACKS - 1 - track) * 8) as u32
    }

    pub fn from_symbols(syms: &[u8]) -> Letter {
        assert!(syms.len() <= MAX_TRACKS, "too many tracks");
        let mut v = 0u128;
        for (i, &s) in syms.iter().enumerate() {
            v |= (s as u128) << Self::shift(i);
        }
        Letter(v)
    }

    #[inline]
    pub fn get(self, track: usize) -> u8 {
        (self.0 >> Self::shift(track)) as u8
    }

    #[inline]
    pub fn with(self, track: usize, sym: u8) -> Letter {
        let sh = Self::shift(track);
        Letter((self.0 & !(0xFFu128 << sh)) | ((sym as u128) << sh))
    }

    pub fn symbols(self, tracks: usize) -> Vec<u8> {
        (0..tracks).map(|t| self.get(t)).collect()
    }

    /// True when every one of the first `tracks` entries is `⋄`.
    #[inline]
    pub fn is_all_pad(self, tracks: usize) -> bool {
        self.0 & mask(tracks) == mask(tracks)
    }

    /// Move the entries of this letter to new track positions.
    #[inline]
    pub fn remap(self, map: &[usize]) -> Letter {
        let mut v = 0u128;
        for (i, &to) in map.iter().enumerate() {
            v |= (self.get(i) as u128) << Self::shift(to);
        }
        Letter(v)
    }

    /// Keep the listed tracks, in the listed order.
    #[inline]
    pub fn select(self, keep: &[usize]) -> Letter {
        let mut v = 0u128;
        for (i, &from) in keep.iter().enumerate() {
            v |= (self.get(from) as u128) << Self::shift(i);
        }
        Letter(v)
    }
}

/// Byte mask covering the first `tracks` tracks.
#[inline]
pub fn mask(tracks: usize) -> u128 {
    let mut m = 0u128;
    for t in 0..tracks {
        m |= 0xFFu128 << Letter::shift(t);
    }
    m
}

/// Byte mask covering the listed track positions.
pub fn mask_of(positions: &[usize]) -> u128 {
    positions.iter().fold(0u128, |m, &t| m | (0xFFu128 << Letter::shift(t)))
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Letter({:032x})", self.0)
    }
}

/// A convolution `w_1 ⊗ ... ⊗ w_k` of k symbol strings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrackWord {
    pub tracks: usize,
    pub letters: Vec<Letter>,
}

impl TrackWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Split back into per-track strings, dropping padding.
    pub fn unconvolve(&self) -> Vec<Vec<u8>> {
        (0..self.tracks)
            .map(|t| self.letters.iter().map(|l| l.get(t)).filter(|&s| s != PAD).collect())
            .collect()
    }

    /// True when padding appears only as a suffix on every track and no
    /// letter is entirely padding.
    pub fn is_well_formed(&self) -> bool {
        let mut ended = vec![false; self.tracks];
        for l in &self.letters {
            if l.is_all_pad(self.tracks) {
                return false;
            }
            for (t, e) in ended.iter_mut().enumerate() {
                match (l.get(t) == PAD, *e) {
                    (true, _) => *e = true,
                    (false, true) => return false,
                    (false, false) => {}
                }
            }
        }
        true
    }

    /// Render each track on its own line using `render` for symbols and `⋄`
    /// for padding.
    pub fn display_rows(&self, render: impl Fn(u8) -> String) -> Vec<String> {
        (0..self.tracks)
            .map(|t| {
                self.letters
                    .iter()
                    .map(|l| match l.get(t) {
                        PAD => "⋄".to_string(),
                        s => render(s),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Convolution of symbol strings: the i-th letter stacks the i-th symbols,
/// with `⋄` past the end of shorter strings.
pub fn convolve(words: &[Vec<u8>]) -> TrackWord {
    assert!(!words.is_empty() && words.len() <= MAX_TRACKS, "track count out of range");
    let n = words.iter().map(Vec::len).max().unwrap_or(0);
    let letters = (0..n)
        .map(|i| {
            let syms: Vec<u8> = words.iter().map(|w| w.get(i).copied().unwrap_or(PAD)).collect();
            Letter::from_symbols(&syms)
        })
        .collect();
    TrackWord { tracks: words.len(), letters }
}
