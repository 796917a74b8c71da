use cardioseq::data::{ImputationPolicy, Label, Preprocessor};
use cardioseq::model::AnyModel;
use cardioseq::nn::ModelParams;
use cardioseq::persist::{model_from_text, model_to_text};
use cardioseq::synthetic::separable;
use cardioseq::train::{cross_entropy, train, train_network, Adam, AdamState, Hyperparams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn defaults_fit_the_synthetic_set() {
    let data = separable(200, 42);
    let model = train(&data, &Hyperparams::default(), None).unwrap();
    let curve = &model.curve.epochs;
    assert_eq!(curve.len(), 50);
    let last = curve.last().unwrap();
    assert_eq!(last.train_accuracy, 1.0);
    assert!(last.train_loss < 0.2, "{}", last.train_loss);
    assert!(last.train_loss < curve[0].train_loss);
    for r in data.records.iter().take(10) {
        assert_eq!(model.predict(&r.features).unwrap().class, r.label);
    }
}

#[test]
fn training_is_bitwise_reproducible() {
    let data = separable(60, 7);
    let hyper = Hyperparams {
        epochs: 5,
        ..Default::default()
    };
    let a = train(&data, &hyper, None).unwrap();
    let b = train(&data, &hyper, None).unwrap();
    assert_eq!(a, b);
    let c = train(&data, &Hyperparams { seed: 43, ..hyper }, None).unwrap();
    assert_ne!(a.params, c.params);
}

#[test]
fn zero_epochs_returns_the_initialization() {
    let data = separable(20, 1);
    let hyper = Hyperparams {
        epochs: 0,
        ..Default::default()
    };
    let model = train(&data, &hyper, None).unwrap();
    let init = ModelParams::init(
        hyper.architecture(),
        &mut ChaCha8Rng::seed_from_u64(hyper.seed),
    )
    .unwrap();
    assert_eq!(model.params, init);
    assert!(model.curve.epochs.is_empty());
    let text = model_to_text(&AnyModel::Cnn(model.clone()));
    match model_from_text(&text).unwrap() {
        AnyModel::Cnn(back) => {
            assert_eq!(back.params, model.params);
            assert_eq!(back.preprocessor, model.preprocessor);
        }
        other => panic!("wrong family {other:?}"),
    }
}

#[test]
fn validation_curve_is_recorded_when_given() {
    let data = separable(40, 3);
    let val = separable(20, 4);
    let hyper = Hyperparams {
        epochs: 3,
        ..Default::default()
    };
    let model = train(&data, &hyper, Some(&val)).unwrap();
    assert!(model
        .curve
        .epochs
        .iter()
        .all(|e| e.val_loss.is_some() && e.val_accuracy.is_some()));
    assert_eq!(model.curve.to_csv().lines().count(), 4);
}

#[test]
fn train_network_agrees_with_train() {
    let data = separable(30, 5);
    let hyper = Hyperparams {
        epochs: 2,
        ..Default::default()
    };
    let pre = Preprocessor::fit(&data, ImputationPolicy::default()).unwrap();
    let samples = pre.transform(&data).unwrap();
    let (params, _) = train_network(&samples, &hyper, None).unwrap();
    assert_eq!(params, train(&data, &hyper, None).unwrap().params);
}

#[test]
fn adam_first_and_second_steps_follow_the_recurrence() {
    let (lr, b1, b2, eps) = (0.001, 0.9, 0.999, 1e-8);
    let opt = Adam {
        learning_rate: lr,
        beta1: b1,
        beta2: b2,
        epsilon: eps,
    };
    let (g1, g2) = (0.3, -1.7);
    let mut theta = [2.0];
    let mut state = AdamState::new(1);
    opt.step(&mut theta, &[g1], &mut state).unwrap();
    // first step moves by lr * g / (|g| + eps)
    assert!((theta[0] - (2.0 - lr * g1 / (g1.abs() + eps))).abs() < 1e-12);

    opt.step(&mut theta, &[g2], &mut state).unwrap();
    let m = b1 * (1.0 - b1) * g1 + (1.0 - b1) * g2;
    let v = b2 * (1.0 - b2) * g1 * g1 + (1.0 - b2) * g2 * g2;
    let m_hat = m / (1.0 - b1 * b1);
    let v_hat = v / (1.0 - b2 * b2);
    let want = 2.0 - lr * g1 / (g1.abs() + eps) - lr * m_hat / (v_hat.sqrt() + eps);
    assert!((theta[0] - want).abs() < 1e-12);
    assert_eq!(state.step_count, 2);
}

#[test]
fn loss_is_zero_at_certainty() {
    assert_eq!(cross_entropy(1.0, Label::Present), 0.0);
    assert_eq!(cross_entropy(0.0, Label::Absent), 0.0);
    assert!(cross_entropy(0.0, Label::Present).is_finite());
}

proptest! {
    #[test]
    fn losses_are_nonnegative(alpha in 0.0f64..=1.0, present in any::<bool>()) {
        let label = if present { Label::Present } else { Label::Absent };
        prop_assert!(cross_entropy(alpha, label) >= 0.0);
    }
}
