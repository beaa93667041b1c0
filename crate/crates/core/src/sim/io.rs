use super::FunctionalSample;
use std::io::{self, Write};

pub const SAMPLE_CSV_HEADER: &str = "path_id,a,b,c,x_end,n_resets";

/// Write samples as CSV with shortest round-trip number formatting.
pub fn write_samples_csv<W: Write>(mut w: W, samples: &[FunctionalSample]) -> io::Result<()> {
    writeln!(w, "{SAMPLE_CSV_HEADER}")?;
    for (i, s) in samples.iter().enumerate() {
        writeln!(w, "{i},{},{},{},{},{}", s.a, s.b, s.c, s.x_end, s.n_resets)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_values() {
        let s = FunctionalSample {
            a: 0.1,
            b: -1.0 / 3.0,
            c: 2.5,
            x_end: 1e-300,
            n_resets: 4,
        };
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "0");
        assert_eq!(row[2].parse::<f64>().unwrap(), s.b);
        assert_eq!(row[4].parse::<f64>().unwrap(), s.x_end);
        assert_eq!(row[5], "4");
    }
}
