//! Sample one soup in a window and write its loops to a binary dump that
//! can be read back (or plotted by external tools).

use bls::charfn::MarkDistribution;
use bls::mc::{read_loop_dump, sample_soup, write_loop_dump, Window};
use bls::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> bls::Result<()> {
    let window = Window::centered(Complex64::new(0.0, 0.0), 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let soup = sample_soup(1.0, &window, (1e-3, 1.0), 256, &MarkDistribution::Bernoulli, &mut rng)?;
    let charge: f64 = soup.marks.iter().sum();
    println!("{} loops, total mark {charge}", soup.loops.len());

    let path = std::env::temp_dir().join("bls_loops.bin");
    let mut file = std::fs::File::create(&path)?;
    write_loop_dump(&mut file, &soup.loops)?;
    let back = read_loop_dump(&mut std::fs::File::open(&path)?)?;
    let longest = back.iter().map(|l| l.duration).fold(0.0, f64::max);
    println!("read {} loops back from {}, longest duration {longest:.4}", back.len(), path.display());
    Ok(())
}
