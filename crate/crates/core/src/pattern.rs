//! Coloured rectangular patterns: the input of every synthesis problem.
//!
//! Coordinates are 1-based, `x` grows west to east and `y` grows south to
//! north, so the seed corner is the south-west one. Cells are stored
//! row-major starting from the southern row, which is also the order in
//! which the assembly grows.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::ParseError;

/// Colour index, 0-based.
pub type Colour = u16;

/// An `m x n` grid coloured onto `[0, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    width: usize,
    height: usize,
    colours: usize,
    cells: Vec<Colour>,
}

impl Pattern {
    /// Builds a pattern from row-major cells, southern row first.
    ///
    /// Fails if a colour is out of range or some colour in `[0, colours)`
    /// is never used.
    pub fn new(
        width: usize,
        height: usize,
        colours: usize,
        cells: Vec<Colour>,
    ) -> Result<Self, ParseError> {
        if width == 0 || height == 0 {
            return Err(ParseError::Header("dimensions must be positive".into()));
        }
        if colours == 0 {
            return Err(ParseError::Header("colour count must be positive".into()));
        }
        if cells.len() != width * height {
            return Err(ParseError::Shape {
                expected: width * height,
                found: cells.len(),
            });
        }
        let mut used = vec![false; colours];
        for (i, &c) in cells.iter().enumerate() {
            if c as usize >= colours {
                return Err(ParseError::ColourOutOfRange {
                    x: i % width + 1,
                    y: i / width + 1,
                    colour: c as usize,
                    colours,
                });
            }
            used[c as usize] = true;
        }
        if let Some(c) = used.iter().position(|u| !u) {
            return Err(ParseError::UnusedColour(c));
        }
        Ok(Self {
            width,
            height,
            colours,
            cells,
        })
    }

    /// Builds a pattern from a colour function, using as many colours as the
    /// function produces. Colours are renumbered densely by first use when
    /// the image is not already `[0, k)`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Colour) -> Self {
        assert!(width >= 1 && height >= 1, "pattern dimensions must be positive");
        let mut cells = Vec::with_capacity(width * height);
        for y in 1..=height {
            for x in 1..=width {
                cells.push(f(x, y));
            }
        }
        Self::from_cells_dense(width, height, cells)
    }

    fn from_cells_dense(width: usize, height: usize, mut cells: Vec<Colour>) -> Self {
        let max = cells.iter().copied().max().unwrap_or(0) as usize;
        let mut used = vec![false; max + 1];
        for &c in &cells {
            used[c as usize] = true;
        }
        if used.iter().all(|&u| u) {
            return Self {
                width,
                height,
                colours: max + 1,
                cells,
            };
        }
        let mut remap = vec![Colour::MAX; max + 1];
        let mut next = 0;
        for c in cells.iter_mut() {
            if remap[*c as usize] == Colour::MAX {
                remap[*c as usize] = next;
                next += 1;
            }
            *c = remap[*c as usize];
        }
        Self {
            width,
            height,
            colours: next as usize,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn colour_count(&self) -> usize {
        self.colours
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Colour at 1-based `(x, y)`.
    pub fn colour(&self, x: usize, y: usize) -> Colour {
        self.cells[self.index(x, y)]
    }

    /// Colour at a row-major cell index.
    pub fn colour_at(&self, cell: usize) -> Colour {
        self.cells[cell]
    }

    pub fn cells(&self) -> &[Colour] {
        &self.cells
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!((1..=self.width).contains(&x) && (1..=self.height).contains(&y));
        (y - 1) * self.width + (x - 1)
    }

    /// 1-based coordinates of a row-major cell index.
    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width + 1, cell / self.width + 1)
    }

    /// The sub-pattern on `[1, width] x [1, height]`, with colours renumbered
    /// if some disappear.
    pub fn restrict(&self, width: usize, height: usize) -> Pattern {
        assert!(width <= self.width && height <= self.height);
        Pattern::from_fn(width, height, |x, y| self.colour(x, y))
    }

    /// Parses the line-oriented pattern format: header `m n k`, then `n`
    /// rows of `m` colour indices with the northern row first. Lines
    /// starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| ParseError::Header("missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ParseError::Header(format!(
                "expected `m n k`, got `{header}`"
            )));
        }
        let parse_dim = |s: &str| -> Result<usize, ParseError> {
            s.parse::<usize>()
                .map_err(|_| ParseError::Header(format!("not a non-negative integer: `{s}`")))
        };
        let (width, height, colours) = (
            parse_dim(fields[0])?,
            parse_dim(fields[1])?,
            parse_dim(fields[2])?,
        );
        if width == 0 || height == 0 || colours == 0 {
            return Err(ParseError::Header("dimensions must be positive".into()));
        }
        let mut rows: Vec<Vec<Colour>> = Vec::with_capacity(height);
        for (row_no, line) in lines.enumerate() {
            if row_no >= height {
                return Err(ParseError::Shape {
                    expected: height,
                    found: row_no + 1,
                });
            }
            let row: Vec<Colour> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Colour>()
                        .map_err(|_| ParseError::Cell(tok.to_string()))
                })
                .collect::<Result<_, _>>()?;
            if row.len() != width {
                return Err(ParseError::RowLength {
                    row: height - row_no,
                    expected: width,
                    found: row.len(),
                });
            }
            rows.push(row);
        }
        if rows.len() != height {
            return Err(ParseError::Shape {
                expected: height,
                found: rows.len(),
            });
        }
        let cells = rows.into_iter().rev().flatten().collect();
        Pattern::new(width, height, colours, cells)
    }

    /// Serialises to the pattern format. `parse(to_text(p)) == p`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.width, self.height, self.colours);
        for y in (1..=self.height).rev() {
            let row = &self.cells[(y - 1) * self.width..y * self.width];
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Parity of `binomial(x + y - 2, x - 1)`: the discrete Sierpinski triangle
/// with its right angle at the south-west corner. Row 1 and column 1 are all
/// ones and interior cells satisfy `v(x, y) = v(x - 1, y) xor v(x, y - 1)`.
pub fn sierpinski(width: usize, height: usize) -> Pattern {
    assert!(width >= 1 && height >= 1, "pattern dimensions must be positive");
    let cells = (1..=height)
        .flat_map(|y| (1..=width).map(move |x| (x, y)))
        .map(|(x, y)| Colour::from((x - 1) & (y - 1) == 0))
        .collect();
    Pattern::from_cells_dense(width, height, cells)
}

/// Binary counter: row `y` holds `y - 1` in binary with the least
/// significant bit in column 1, so carries travel eastward with the
/// assembly. Colour 1 marks a set bit.
///
/// Degenerate sizes that use only one colour (a single row, or one row of
/// zeros and nothing else) produce a monochrome pattern.
pub fn binary_counter(width: usize, height: usize) -> Pattern {
    assert!(width >= 1 && height >= 1, "pattern dimensions must be positive");
    let cells: Vec<Colour> = (1..=height)
        .flat_map(|y| (1..=width).map(move |x| (x, y)))
        .map(|(x, y)| {
            let value = (y - 1) as u128;
            let bit = x - 1;
            if bit >= 128 {
                0
            } else {
                ((value >> bit) & 1) as Colour
            }
        })
        .collect();
    Pattern::from_cells_dense(width, height, cells)
}

/// Uniformly random colouring that uses every one of `colours` colours,
/// drawn by rejection.
pub fn random<R: Rng + ?Sized>(width: usize, height: usize, colours: usize, rng: &mut R) -> Pattern {
    assert!(width >= 1 && height >= 1, "pattern dimensions must be positive");
    assert!(
        (1..=width * height).contains(&colours),
        "colour count must be between 1 and the cell count"
    );
    loop {
        let cells = (0..width * height)
            .map(|_| rng.gen_range(0..colours) as Colour)
            .collect();
        if let Ok(p) = Pattern::new(width, height, colours, cells) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_cell() {
        let p = Pattern::parse("1 1 1\n0\n").unwrap();
        assert_eq!((p.width(), p.height(), p.colour_count()), (1, 1, 1));
    }

    #[test]
    fn parses_checkerboard_with_comments() {
        let p = Pattern::parse("# checker\n2 2 2\n0 1\n\n1 0\n").unwrap();
        assert_eq!(p.colour(1, 2), 0);
        assert_eq!(p.colour(2, 2), 1);
        assert_eq!(p.colour(1, 1), 1);
        assert_eq!(p.colour(2, 1), 0);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(Pattern::parse(""), Err(ParseError::Header(_))));
        assert!(matches!(Pattern::parse("2 2"), Err(ParseError::Header(_))));
        assert!(matches!(Pattern::parse("1 1 1\nx\n"), Err(ParseError::Cell(_))));
        assert!(matches!(
            Pattern::parse("1 1 1\n1\n"),
            Err(ParseError::ColourOutOfRange { .. })
        ));
        assert!(matches!(
            Pattern::parse("2 1 1\n0\n"),
            Err(ParseError::RowLength { .. })
        ));
        assert!(matches!(
            Pattern::parse("1 2 1\n0\n"),
            Err(ParseError::Shape { .. })
        ));
        assert!(matches!(
            Pattern::parse("1 1 1\n0\n0\n"),
            Err(ParseError::Shape { .. })
        ));
        assert!(matches!(
            Pattern::parse("2 1 2\n0 0\n"),
            Err(ParseError::UnusedColour(1))
        ));
    }

    #[test]
    fn sierpinski_small_cases() {
        let p = sierpinski(1, 1);
        assert_eq!(p.colour_count(), 1);
        assert_eq!(p.colour(1, 1), 0);

        let p = sierpinski(2, 2);
        assert_eq!(p.colour(1, 1), 1);
        assert_eq!(p.colour(2, 1), 1);
        assert_eq!(p.colour(1, 2), 1);
        assert_eq!(p.colour(2, 2), 0);
    }

    #[test]
    fn sierpinski_matches_xor_recurrence() {
        let p = sierpinski(40, 37);
        for y in 2..=37 {
            for x in 2..=40 {
                assert_eq!(p.colour(x, y), p.colour(x - 1, y) ^ p.colour(x, y - 1));
            }
        }
        assert!((1..=40).all(|x| p.colour(x, 1) == 1));
        assert!((1..=37).all(|y| p.colour(1, y) == 1));
    }

    #[test]
    fn counter_rows_count_upward() {
        let p = binary_counter(2, 4);
        let rows: Vec<(u16, u16)> = (1..=4).map(|y| (p.colour(2, y), p.colour(1, y))).collect();
        assert_eq!(rows, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let p = binary_counter(32, 32);
        assert_eq!(p.colour_count(), 2);
        assert!((1..=32).all(|x| p.colour(x, 1) == 0));
    }

    #[test]
    fn text_round_trip() {
        for p in [sierpinski(7, 5), binary_counter(3, 8), sierpinski(1, 1)] {
            let text = p.to_text();
            let q = Pattern::parse(&text).unwrap();
            assert_eq!(p, q);
            assert_eq!(q.to_text(), text);
        }
    }

    #[test]
    fn random_patterns_use_every_colour() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for k in 1..=4 {
            let p = random(3, 2, k, &mut rng);
            assert_eq!(p.colour_count(), k);
        }
        let a = random(5, 5, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(9));
        let b = random(5, 5, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
