//! Analytic accuracy of LENORI, ALENO and LENnolog for a power-law tail
//! with α = 1.3, N_L = 10, N_max = 5000, 558 large events over 6 years.

use lenori::stats::RseReport;
use lenori::TailModel;

fn main() -> lenori::Result<()> {
    let model = TailModel::bounded(1.3, 10, 5000)?;
    let n_large = 558.0;
    let f_large = n_large / 6.0;
    let report = RseReport::analytic(&model, n_large, f_large, 0.1)?;
    let logs = model.unbounded().log_moments()?;

    println!("E[ln(N/(N_L-0.5))]  {:.6}", logs.excess_mean);
    println!("RSE_LEN             {:.4}", report.rse_len);
    println!("RSE_ALE             {:.4}", report.rse_ale);
    println!("n_large^min         {:.1}", report.n_large_min);
    println!("n_year^min          {:.2}", report.n_year_min.unwrap_or(f64::NAN));
    println!("c                   {:.5}", report.c);
    println!("RSE_Pb              {:.3}", report.rse_pb);
    println!("RSE_LENnolog        {:.4}", report.rse_lennolog);
    println!("n_large^minnolog    {:.0}", report.n_large_minnolog);
    println!("n_year^minnolog     {:.1}", report.n_year_minnolog.unwrap_or(f64::NAN));
    Ok(())
}
