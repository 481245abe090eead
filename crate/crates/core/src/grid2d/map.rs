use std::fmt::{self, Write as _};

/// Per-cell traversal costs; `None` is an obstacle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMap {
    width: u32,
    height: u32,
    /// Row-major; 0 marks an obstacle.
    cells: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct MapParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based; 0 when the error concerns the whole line.
    pub column: usize,
    pub kind: MapErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapErrorKind {
    MissingHeader(&'static str),
    BadHeaderValue(&'static str, String),
    UnknownMapType(String),
    UnknownGlyph(char),
    RaggedRow { expected: usize, found: usize },
    MissingRows { expected: usize, found: usize },
    ExtraRow,
    BadCost(String),
}

impl fmt::Display for MapErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapErrorKind::MissingHeader(h) => write!(f, "expected header `{h}`"),
            MapErrorKind::BadHeaderValue(h, v) => write!(f, "bad value {v:?} for header `{h}`"),
            MapErrorKind::UnknownMapType(t) => write!(f, "unknown map type {t:?}"),
            MapErrorKind::UnknownGlyph(c) => write!(f, "unknown glyph {c:?}"),
            MapErrorKind::RaggedRow { expected, found } => {
                write!(f, "row has {found} cells, expected {expected}")
            }
            MapErrorKind::MissingRows { expected, found } => {
                write!(f, "input ends after {found} rows, expected {expected}")
            }
            MapErrorKind::ExtraRow => write!(f, "more rows than the height header declares"),
            MapErrorKind::BadCost(v) => write!(f, "bad cell cost {v:?} (expected -1 or an integer >= 1)"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MapType {
    Octile,
    Cost,
}

fn err(line: usize, column: usize, kind: MapErrorKind) -> MapParseError {
    MapParseError { line, column, kind }
}

impl CostMap {
    /// Uniform cost-1 map with no obstacles.
    pub fn open(width: u32, height: u32) -> Self {
        Self::filled(width, height, 1)
    }

    pub fn filled(width: u32, height: u32, cost: u32) -> Self {
        assert!(width > 0 && height > 0, "empty map");
        CostMap { width, height, cells: vec![cost; (width * height) as usize] }
    }

    /// Builds a map from row-major costs (`None` = obstacle, costs >= 1).
    pub fn from_costs(width: u32, height: u32, costs: impl IntoIterator<Item = Option<u32>>) -> Self {
        let cells: Vec<u32> = costs.into_iter().map(|c| c.unwrap_or(0)).collect();
        assert_eq!(cells.len(), (width * height) as usize, "cost count does not match dimensions");
        CostMap { width, height, cells }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
    }

    /// `None` for obstacles and out-of-bounds cells.
    pub fn cost(&self, x: i64, y: i64) -> Option<u32> {
        if !self.in_bounds(x, y) {
            return None;
        }
        match self.cells[(y as u64 * self.width as u64 + x as u64) as usize] {
            0 => None,
            c => Some(c),
        }
    }

    pub fn is_free(&self, x: i64, y: i64) -> bool {
        self.cost(x, y).is_some()
    }

    pub fn set(&mut self, x: u32, y: u32, cost: Option<u32>) {
        assert!(x < self.width && y < self.height);
        self.cells[(y * self.width + x) as usize] = cost.unwrap_or(0);
    }

    /// Smallest passable cell cost, `None` if every cell is blocked.
    pub fn min_cost(&self) -> Option<u32> {
        self.cells.iter().copied().filter(|&c| c > 0).min()
    }

    pub fn free_cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.height)
            .flat_map(move |y| (0..self.width).map(move |x| (x, y)))
            .filter(|&(x, y)| self.is_free(x as i64, y as i64))
    }

    /// Parses either a MovingAI `type octile` map (glyphs) or a `type cost`
    /// map (comma-separated integers, `-1` = obstacle).
    ///
    /// Glyphs `.` and `G` are passable with cost 1; `@`, `O`, `T`, `S` and
    /// `W` are obstacles.
    pub fn parse(text: &[u8]) -> Result<CostMap, MapParseError> {
        // a final newline terminates the last row rather than opening a new one
        let text = text.strip_suffix(b"\n").unwrap_or(text);
        let mut lines = text.split(|&b| b == b'\n').map(|l| l.strip_suffix(b"\r").unwrap_or(l));
        let mut line_no = 0;
        let mut next_line = |name: &'static str| {
            line_no += 1;
            match lines.next() {
                Some(l) => Ok((line_no, l)),
                None => Err(err(line_no, 1, MapErrorKind::MissingHeader(name))),
            }
        };

        let (n, l) = next_line("type")?;
        let ty = header_value(n, l, "type")?;
        let ty = match ty.as_str() {
            "octile" => MapType::Octile,
            "cost" => MapType::Cost,
            _ => return Err(err(n, 6, MapErrorKind::UnknownMapType(ty))),
        };
        let (n, l) = next_line("height")?;
        let height = dimension(n, l, "height")?;
        let (n, l) = next_line("width")?;
        let width = dimension(n, l, "width")?;
        let (n, l) = next_line("map")?;
        if l.trim_ascii() != b"map" {
            return Err(err(n, 1, MapErrorKind::MissingHeader("map")));
        }

        let mut cells = Vec::with_capacity((width * height) as usize);
        let mut rows = 0usize;
        let mut last_line = n;
        for (i, raw) in lines.enumerate() {
            let line = n + 1 + i;
            if rows == height as usize {
                if raw.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                return Err(err(line, 1, MapErrorKind::ExtraRow));
            }
            match ty {
                MapType::Octile => parse_glyph_row(line, raw, width as usize, &mut cells)?,
                MapType::Cost => parse_cost_row(line, raw, width as usize, &mut cells)?,
            }
            rows += 1;
            last_line = line;
        }
        if rows < height as usize {
            return Err(err(last_line, 0, MapErrorKind::MissingRows { expected: height as usize, found: rows }));
        }
        Ok(CostMap { width, height, cells })
    }

    /// Writes the `type cost` text form.
    pub fn to_cost_text(&self) -> String {
        let mut out = format!("type cost\nheight {}\nwidth {}\nmap\n", self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                if x > 0 {
                    out.push(',');
                }
                match self.cost(x as i64, y as i64) {
                    Some(c) => write!(out, "{c}").unwrap(),
                    None => out.push_str("-1"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes a MovingAI `type octile` map. Costs are dropped: every passable
    /// cell becomes `.`.
    pub fn to_movingai(&self) -> String {
        let mut out = format!("type octile\nheight {}\nwidth {}\nmap\n", self.height, self.width);
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.is_free(x as i64, y as i64) { '.' } else { '@' });
            }
            out.push('\n');
        }
        out
    }
}

fn header_value(line: usize, raw: &[u8], name: &'static str) -> Result<String, MapParseError> {
    let text = String::from_utf8_lossy(raw);
    let mut parts = text.split_whitespace();
    if parts.next() != Some(name) {
        return Err(err(line, 1, MapErrorKind::MissingHeader(name)));
    }
    match (parts.next(), parts.next()) {
        (Some(v), None) => Ok(v.to_string()),
        _ => Err(err(line, name.len() + 2, MapErrorKind::BadHeaderValue(name, text.trim().to_string()))),
    }
}

fn dimension(line: usize, raw: &[u8], name: &'static str) -> Result<u32, MapParseError> {
    let v = header_value(line, raw, name)?;
    match v.parse::<u32>() {
        Ok(d) if d > 0 && d <= 1 << 15 => Ok(d),
        _ => Err(err(line, name.len() + 2, MapErrorKind::BadHeaderValue(name, v))),
    }
}

fn parse_glyph_row(line: usize, raw: &[u8], width: usize, cells: &mut Vec<u32>) -> Result<(), MapParseError> {
    let row = raw.trim_ascii_end();
    for (i, &b) in row.iter().enumerate() {
        let cost = match b {
            b'.' | b'G' => 1,
            b'@' | b'O' | b'T' | b'S' | b'W' => 0,
            _ => {
                let c = String::from_utf8_lossy(&row[i..]).chars().next().unwrap_or('?');
                return Err(err(line, i + 1, MapErrorKind::UnknownGlyph(c)));
            }
        };
        if i < width {
            cells.push(cost);
        }
    }
    if row.len() != width {
        return Err(err(line, row.len().min(width) + 1, MapErrorKind::RaggedRow { expected: width, found: row.len() }));
    }
    Ok(())
}

fn parse_cost_row(line: usize, raw: &[u8], width: usize, cells: &mut Vec<u32>) -> Result<(), MapParseError> {
    let text = String::from_utf8_lossy(raw);
    let text = text.trim_end();
    let mut found = 0;
    let mut column = 1;
    for field in text.split(',') {
        let value = field.trim();
        let cost = match value.parse::<i64>() {
            Ok(-1) => 0,
            Ok(c) if (1..=u32::MAX as i64).contains(&c) => c as u32,
            _ => return Err(err(line, column, MapErrorKind::BadCost(value.to_string()))),
        };
        found += 1;
        if found <= width {
            cells.push(cost);
        }
        column += field.len() + 1;
    }
    if found != width {
        return Err(err(line, 0, MapErrorKind::RaggedRow { expected: width, found }));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CostMap, MapParseError> {
        CostMap::parse(s.as_bytes())
    }

    #[test]
    fn all_passable_two_by_two() {
        let m = parse("type octile\nheight 2\nwidth 2\nmap\n..\n..\n").unwrap();
        assert_eq!((m.width(), m.height()), (2, 2));
        assert_eq!(m.free_cells().count(), 4);
        assert!(m.free_cells().all(|(x, y)| m.cost(x as i64, y as i64) == Some(1)));
    }

    #[test]
    fn glyph_table() {
        let m = parse("type octile\nheight 1\nwidth 2\nmap\n.@\n").unwrap();
        assert_eq!(m.cost(0, 0), Some(1));
        assert_eq!(m.cost(1, 0), None);
        let m = parse("type octile\nheight 1\nwidth 7\nmap\nG.OTSW@").unwrap();
        let free: Vec<_> = (0..7).map(|x| m.is_free(x, 0)).collect();
        assert_eq!(free, vec![true, true, false, false, false, false, false]);
    }

    #[test]
    fn too_few_rows_reports_line_six() {
        let e = parse("type octile\nheight 3\nwidth 2\nmap\n..\n..\n").unwrap_err();
        assert_eq!(e.line, 6);
        assert_eq!(e.kind, MapErrorKind::MissingRows { expected: 3, found: 2 });
    }

    #[test]
    fn positioned_errors() {
        let e = parse("type octile\nheight 2\nwidth 3\nmap\n...\n.x.\n").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (6, 2, MapErrorKind::UnknownGlyph('x')));
        let e = parse("type octile\nheight 2\nwidth 3\nmap\n...\n..\n").unwrap_err();
        assert_eq!((e.line, e.kind), (6, MapErrorKind::RaggedRow { expected: 3, found: 2 }));
        let e = parse("type octile\nheigth 2\nwidth 3\nmap\n").unwrap_err();
        assert_eq!((e.line, e.kind), (2, MapErrorKind::MissingHeader("height")));
        let e = parse("type octile\nheight 1\nwidth 1\nmap\n.\n@\n").unwrap_err();
        assert_eq!((e.line, e.kind), (6, MapErrorKind::ExtraRow));
        let e = parse("type hex\nheight 1\nwidth 1\nmap\n.\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("type octile\nheight 0\nwidth 1\nmap\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn cost_format_round_trip() {
        let m = parse("type cost\nheight 2\nwidth 3\nmap\n10,20,-1\n1, 2 ,260\n").unwrap();
        assert_eq!(m.cost(2, 0), None);
        assert_eq!(m.cost(1, 1), Some(2));
        assert_eq!(m.min_cost(), Some(1));
        assert_eq!(parse(&m.to_cost_text()).unwrap(), m);
        let e = parse("type cost\nheight 1\nwidth 2\nmap\n3,0\n").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (5, 3, MapErrorKind::BadCost("0".into())));
    }

    #[test]
    fn crlf_and_movingai_writer() {
        let m = parse("type octile\r\nheight 1\r\nwidth 2\r\nmap\r\n.@\r\n").unwrap();
        assert_eq!(parse(&m.to_movingai()).unwrap(), m);
    }
}
