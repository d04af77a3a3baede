use super::{GeoError, GeoPoint, Geometry};

/// Parse `POINT`, `LINESTRING` or `POLYGON` WKT. Keywords are case-insensitive.
pub fn parse_wkt(text: &str) -> Result<Geometry, GeoError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    p.ws();
    let kw_pos = p.pos;
    let kw = p.keyword().to_ascii_uppercase();
    let g = match kw.as_str() {
        "POINT" => {
            p.open()?;
            let c = p.coord()?;
            p.close()?;
            Geometry::Point(c)
        }
        "LINESTRING" => Geometry::line_string(p.coord_list()?)?,
        "POLYGON" => {
            p.open()?;
            let mut rings = vec![p.coord_list()?];
            while p.comma() {
                rings.push(p.coord_list()?);
            }
            p.close()?;
            let exterior = rings.remove(0);
            Geometry::polygon(exterior, rings)?
        }
        "" => return Err(p.err_at(kw_pos, "expected geometry keyword")),
        other => return Err(p.err_at(kw_pos, &format!("unsupported geometry type `{other}`"))),
    };
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(g)
}

pub fn serialize_wkt(g: &Geometry) -> String {
    fn num(v: f64) -> String {
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v}")
    }
    fn coords(ps: &[GeoPoint]) -> String {
        let parts: Vec<String> = ps.iter().map(|p| format!("{} {}", num(p.lon), num(p.lat))).collect();
        format!("({})", parts.join(", "))
    }
    match g {
        Geometry::Point(p) => format!("POINT ({} {})", num(p.lon), num(p.lat)),
        Geometry::LineString(ps) => format!("LINESTRING {}", coords(ps)),
        Geometry::Polygon { exterior, holes } => {
            let rings: Vec<String> = std::iter::once(exterior).chain(holes).map(|r| coords(r)).collect();
            format!("POLYGON ({})", rings.join(", "))
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err_at(&self, pos: usize, message: &str) -> GeoError {
        GeoError::Syntax { pos, message: message.to_string() }
    }

    fn err(&self, message: &str) -> GeoError {
        self.err_at(self.pos, message)
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn keyword(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn punct(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn open(&mut self) -> Result<(), GeoError> {
        if self.punct(b'(') {
            Ok(())
        } else {
            Err(self.err("expected `(`"))
        }
    }

    fn close(&mut self) -> Result<(), GeoError> {
        if self.punct(b')') {
            Ok(())
        } else {
            Err(self.err("expected `)`"))
        }
    }

    fn comma(&mut self) -> bool {
        self.punct(b',')
    }

    fn number(&mut self) -> Result<f64, GeoError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && matches!(self.s[self.pos], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
            self.pos += 1;
        }
        let tok = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() && !tok.is_empty() => Ok(v),
            _ => Err(self.err_at(start, "expected number")),
        }
    }

    fn coord(&mut self) -> Result<GeoPoint, GeoError> {
        let lon = self.number()?;
        let lat = self.number()?;
        GeoPoint::new(lon, lat)
    }

    fn coord_list(&mut self) -> Result<Vec<GeoPoint>, GeoError> {
        self.open()?;
        let mut out = vec![self.coord()?];
        while self.comma() {
            out.push(self.coord()?);
        }
        self.close()?;
        Ok(out)
    }
}
