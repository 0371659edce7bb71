//! Block coefficients of a four-point function, compared with the closed
//! forms, and a Virasoro block at large central charge.

use bls::blocks::{closed_form_c, extract_coefficients, virasoro_block_series, BlockLabel};
use bls::charfn::MarkDistribution;
use bls::correlators::{ChargedPoint, CorrelatorConfig};

fn main() -> bls::Result<()> {
    let cfg = CorrelatorConfig::plane(
        1.0,
        MarkDistribution::gaussian(0.8)?,
        vec![
            ChargedPoint::new(0.0, 0.0, 0.9),
            ChargedPoint::new(1.0, 0.0, -0.4),
            ChargedPoint::new(3.0, 1.0, 0.7),
            ChargedPoint::new(-1.0, 2.0, -1.2),
        ],
    )?;
    let table = extract_coefficients(&cfg, 4)?;
    println!(
        "solve residual {:.1e}, condition {:.1e}, truncation residual {:.1e}",
        table.solve_residual, table.condition_number, table.truncation_residual
    );
    for e in table.entries.iter().filter(|e| e.coeff.abs() > 1e-14 && (e.p, e.p_bar) != (3, 3)) {
        let closed = closed_form_c(BlockLabel::new(e.p, e.p_bar), &cfg)
            .map(|c| format!("{c:.12e}"))
            .unwrap_or_else(|_| "-".into());
        println!("C({},{}) = {:>20.12e}  closed form {closed}", e.p, e.p_bar, e.coeff);
    }
    // the (0,3)·(3,0) product also lands on the (3,3) label
    let get = |p, q| table.get(p, q).unwrap_or(0.0);
    println!(
        "C(3,3) = {:>20.12e}  C11³/6 + C03² = {:.12e}",
        get(3, 3),
        get(1, 1).powi(3) / 6.0 + get(0, 3).powi(2)
    );

    let (dp, d) = (0.7, [0.1, 0.2, 0.3, 0.15]);
    for c in [1.0, 10.0, 1e6] {
        let series = virasoro_block_series(c, dp, d, 3)?;
        println!("c = {c:>9}: block coefficients {series:.8?}");
    }
    Ok(())
}
