//! The randomized identity battery, against the true frame and a corrupted one.

use zeck_ew::charfn::GoldenFrame;
use zeck_ew::verify::{run_battery, VerifyOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let report = run_battery(&GoldenFrame::new(), VerifyOptions::default())?;
    print!("{}", report.to_text());

    let broken = run_battery(&GoldenFrame::corrupted(), VerifyOptions::default())?;
    println!("corrupted frame: first failure {:?}", broken.first_failure().map(|r| &r.name));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
