use std::io::{Read, Write};

use super::fit::{LikertHistogram, ValuationFit};
use super::StatsError;

const HISTOGRAM_HEADER: [&str; 6] = ["image_id", "c1", "c2", "c3", "c4", "c5"];
const FIT_HEADER: [&str; 7] = ["image_id", "mu", "sigma", "sse", "mean", "median", "peak"];

fn csv_err(e: csv::Error) -> StatsError {
    StatsError::Csv(e.to_string())
}

/// Reads `image_id,c1,c2,c3,c4,c5`.
pub fn read_histograms_csv<R: Read>(input: R) -> Result<Vec<LikertHistogram>, StatsError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
    if header != HISTOGRAM_HEADER {
        return Err(StatsError::Csv(format!("expected header {}", HISTOGRAM_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (line, row) in rd.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let mut counts = [0i64; 5];
        for (k, c) in counts.iter_mut().enumerate() {
            *c = row[k + 1]
                .trim()
                .parse()
                .map_err(|_| StatsError::Csv(format!("row {}: bad count {:?}", line + 2, &row[k + 1])))?;
        }
        out.push(LikertHistogram::from_signed(row[0].trim(), counts)?);
    }
    Ok(out)
}

pub fn write_histograms_csv<W: Write>(hists: &[LikertHistogram], out: W) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HISTOGRAM_HEADER).map_err(csv_err)?;
    for h in hists {
        let mut row = vec![h.image_id.clone()];
        row.extend(h.counts.iter().map(u64::to_string));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| StatsError::Csv(e.to_string()))
}

/// Writes `image_id,mu,sigma,sse,mean,median,peak`.
pub fn write_fits_csv<W: Write>(fits: &[ValuationFit], out: W) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIT_HEADER).map_err(csv_err)?;
    for f in fits {
        w.write_record([
            f.image_id.clone(),
            format!("{:?}", f.mu),
            format!("{:?}", f.sigma),
            format!("{:?}", f.sse),
            format!("{:?}", f.mean),
            format!("{:?}", f.median),
            format!("{:?}", f.peak),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| StatsError::Csv(e.to_string()))
}

pub fn read_fits_csv<R: Read>(input: R) -> Result<Vec<ValuationFit>, StatsError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != FIT_HEADER {
        return Err(StatsError::Csv(format!("expected header {}", FIT_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let num = |i: usize| {
            row[i]
                .parse::<f64>()
                .map_err(|_| StatsError::Csv(format!("bad number {:?}", &row[i])))
        };
        out.push(ValuationFit {
            image_id: row[0].to_string(),
            mu: num(1)?,
            sigma: num(2)?,
            sse: num(3)?,
            mean: num(4)?,
            median: num(5)?,
            peak: num(6)?,
        });
    }
    Ok(out)
}
