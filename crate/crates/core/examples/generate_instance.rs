//! Generates a seeded instance, centers it and writes it to CSV.

use l1pca::data::{center, parse_csv, write_csv};
use l1pca::prelude::*;

fn main() -> l1pca::Result<()> {
    let spec = InstanceSpec { d: 3, n: 6, outlier_fraction: 0.34, seed: 42, ..InstanceSpec::default() };
    let x = center(&generate(&spec)?)?;
    let mut buf = Vec::new();
    write_csv(&x, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    let back = parse_csv(buf.as_slice(), false)?;
    println!("round trip exact: {}", back.bits_eq(&x));
    Ok(())
}
