use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sci_list(values: &[f64]) -> String {
    values.iter().map(|&v| sci(v)).collect::<Vec<_>>().join(" ")
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sci(0.1), "1.0000000000000001e-1");
        assert_eq!(sci(2f64.ln() * 2.0), "1.3862943611198906e0");
        let back: f64 = sci(1.0 / 3.0).parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("fredent-out-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("x.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
