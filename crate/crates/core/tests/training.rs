use thermocast::data::split_series;
use thermocast::forecast::fit;
use thermocast::lstm::TrainingConfig;
use thermocast::thermal::{
    average_power, generate_disturbances, simulate, DisturbanceConfig, RelayConfig, ThermalModel,
};

fn six_day_load(seed: u64) -> Vec<f64> {
    let d =
        generate_disturbances(&DisturbanceConfig::default(), seed, 7.0 * 86_400.0, 1.0).unwrap();
    let trace = simulate(&ThermalModel::default(), &RelayConfig::default(), &d, 1.0).unwrap();
    let load = average_power(&trace, 100.0).unwrap();
    split_series(&load, 5184, 864).unwrap().0.values
}

// Holds at this width with the default learning rate. Wider networks show
// Adam oscillations late in training that exceed the 5% allowance.
#[test]
fn loss_settles_after_warm_up() {
    for seed in 0..5 {
        let cfg = TrainingConfig {
            hidden_size: 16,
            seed,
            ..Default::default()
        };
        let (_, history) = fit(&six_day_load(seed), &cfg).unwrap();
        assert_eq!(history.len(), 250);
        for e in 30..history.len() {
            assert!(
                history[e] <= 1.05 * history[e - 10],
                "seed {seed} epoch {e}: {} after {}",
                history[e],
                history[e - 10]
            );
        }
        assert!(history[249] < 0.2 * history[0]);
    }
}

#[test]
fn training_continues_from_a_saved_network() {
    let series = six_day_load(3);
    let cfg = TrainingConfig {
        hidden_size: 8,
        epochs: 20,
        seed: 3,
        ..Default::default()
    };
    let (net, first) = fit(&series, &cfg).unwrap();
    let z: Vec<f64> = series.iter().map(|v| (v - net.mu) / net.sigma).collect();
    let (_, more) = thermocast::lstm::train_from(net, &z, &cfg).unwrap();
    assert!(more[0] < first[0]);
}
