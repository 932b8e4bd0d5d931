use amm_core::{ConstantProduct, ConstantProductWithFee, SwapRate, WeightedMean};

pub type DynRate = Box<dyn SwapRate<f64>>;

/// `constprod`, `constprod-fee:<phi>` or `weighted:<w_in>:<w_out>`.
pub fn parse_rate(spec: &str) -> Result<DynRate, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| format!("bad number {s:?} in swap rate {spec:?}"))
    };
    match parts.as_slice() {
        ["constprod"] => Ok(Box::new(ConstantProduct)),
        ["constprod-fee", phi] => ConstantProductWithFee::new(num(phi)?)
            .map(|f| Box::new(f) as DynRate)
            .map_err(|e| e.to_string()),
        ["weighted", a, b] => WeightedMean::new(num(a)?, num(b)?)
            .map(|f| Box::new(f) as DynRate)
            .map_err(|e| e.to_string()),
        _ => Err(format!(
            "unknown swap rate {spec:?}; expected constprod, constprod-fee:<phi> or weighted:<w_in>:<w_out>"
        )),
    }
}
