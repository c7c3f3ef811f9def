//! Frozen reference values.  Every rational below was computed once with
//! an independent arbitrary-precision script and is pinned here; the
//! decimals are 50-digit renderings asserted to lie inside the library's
//! certified enclosures.  A failure means the exact track drifted.

use shiftlab::families::curves::{self, Curve};
use shiftlab::families::exam::{self, exam_bounds, monomial_bound_sq};
use shiftlab::families::figure0::{row0_measure, Figure0Params};
use shiftlab::families::flat::{closed_form_verdict, FlatParams};
use shiftlab::measures::Measure1D;
use shiftlab::numerics::scalar::{parse_rat, rat, rat_int};
use shiftlab::shift1::{forced_weight_sq, Tail, WeightSeq};
use shiftlab::{Rat, Scalar};

/// `value` must lie inside the enclosure `s` (decimal parsed exactly).
fn assert_encloses(s: &Scalar, decimal50: &str, what: &str) {
    let v = parse_rat(decimal50).unwrap();
    assert!(
        *s.lo() <= v && v <= *s.hi(),
        "{what}: [{}, {}] does not contain {decimal50}",
        s.lo(),
        s.hi()
    );
}

fn exact(s: &Scalar) -> &Rat {
    s.as_exact().expect("value should be on the exact track")
}

// ==== threshold curves ====

#[test]
fn curve_squares_match_reference() {
    // (a², h1², h21²) at a = 3/10, 1/2, 7/10, 17/20.
    let table = [
        (rat(9, 100), rat(19757, 32825), rat(53271, 83200)),
        (rat(1, 4), rat(29, 41), rat(387, 512)),
        (rat(49, 100), rat(12797, 14825), rat(32391, 35200)),
        (rat(289, 400), rat(69437, 69800), rat(112311, 116800)),
    ];
    for (a_sq, h1, h21) in table {
        assert_eq!(curves::h1_sq(&a_sq).unwrap(), h1, "h1² at a² = {a_sq}");
        assert_eq!(curves::h21_sq(&a_sq).unwrap(), h21, "h21² at a² = {a_sq}");
    }
    assert_eq!(curves::h2_sq(&rat(1, 4)).unwrap(), rat(45, 76));
    assert_eq!(curves::hinf_sq(&rat(1, 4)).unwrap(), rat(4, 7));
    assert_eq!(curves::h2_sq(&rat(1, 2)).unwrap(), rat(9, 13));
    assert_eq!(curves::hinf_sq(&rat(1, 2)).unwrap(), rat(2, 3));
    // h1 touches 1 exactly at a² = 3/4.
    assert_eq!(curves::h1_sq(&rat(3, 4)).unwrap(), rat_int(1));
}

#[test]
fn curve_decimals_match_reference() {
    let cases = [
        (Curve::H1, rat(9, 100), "0.77581492913261335925302794658932865942677594977469"),
        (Curve::H21, rat(9, 100), "0.80017275778902414948735163188857084097497856825326"),
        (Curve::H1, rat(1, 4), "0.84102144632032523889674087577158716316331744890585"),
        (Curve::H21, rat(1, 4), "0.86940173395272222679841400693657887121220021050715"),
        (Curve::H1, rat(49, 100), "0.92908775000940462440944343821056624772577337839593"),
        (Curve::H21, rat(49, 100), "0.95926996389773595181240263876574811698189366329216"),
        (Curve::H21, rat(289, 400), "0.98059511564249482968634739528459321139428439269018"),
        (Curve::H2, rat(1, 4), "0.76948376406386557159250630525523160257257241318454"),
        (Curve::HInf, rat(1, 4), "0.75592894601845445442903307246836012163150262373784"),
        (Curve::H2, rat(1, 2), "0.83205029433784368302751260018549906451952997857967"),
        (Curve::HInf, rat(1, 2), "0.81649658092772603273242802490196379732198249355223"),
    ];
    for (curve, a_sq, decimal) in cases {
        let v = curve.value(&a_sq).unwrap();
        assert_encloses(&v, decimal, &format!("{} at a² = {a_sq}", curve.name()));
    }
}

#[test]
fn crossing_point_matches_reference() {
    let tol = rat(1, 1_000_000_000_000u64 as i64);
    let a_int = curves::a_int(&tol).unwrap();
    let reference = parse_rat("0.83860274625361270857526503516219936911950329387831").unwrap();
    let err = (a_int.midpoint() - &reference).abs();
    assert!(err <= rat(2, 1_000_000_000_000u64 as i64), "a_int err {err}");

    let sq = curves::a_int_sq(&tol).unwrap();
    let reference_sq =
        parse_rat("0.70325456602410114372774941828049620378749719196154").unwrap();
    assert!((sq - reference_sq).abs() <= rat(2, 1_000_000_000_000u64 as i64));
}

// ==== exam family (η = Lebesgue on [1/2, 3/2]) ====

#[test]
fn exam_functionals_match_reference() {
    let ln3 = exam::eta_inv_t_norm().unwrap();
    assert_encloses(
        &ln3,
        "1.0986122886681096913952452369225257046474905578227",
        "ln 3",
    );

    // γ values of the η-shift: m_k(η) for k = 0..=5.
    let gammas = [
        rat_int(1),
        rat_int(1),
        rat(13, 12),
        rat(5, 4),
        rat(121, 80),
        rat(91, 48),
    ];
    for (k, g) in gammas.iter().enumerate() {
        assert_eq!(&exam::eta_moment(k as u32), g, "m_{k}(η)");
    }

    // Closed-form thresholds at (x², a²) = (81/100, 1/4).
    let bounds = exam_bounds(&rat(81, 100), &rat(1, 4)).unwrap();
    assert_eq!(bounds.h1_y_sq, rat(1539, 4675), "m²");
    assert_encloses(
        &bounds.s().unwrap(),
        "0.48020197564372029529994299801880374544086837000850",
        "s",
    );
    let w = monomial_bound_sq(&rat(81, 100), &rat(1, 4), 1)
        .unwrap()
        .sqrt()
        .unwrap();
    assert_encloses(
        &w,
        "1.7173162476000025183335190082139896823602324284604",
        "w",
    );
}

#[test]
fn eta_packet_inv_t_norms_match_reference() {
    // ‖1/t‖ of the step-n packet of η at offset n−1 equals ln3/m_{n−1}(η);
    // the decimals were computed by direct integration.
    let eta = exam::eta();
    let seq = WeightSeq::new(vec![], Tail::FromMeasure(eta.clone()))
        .unwrap()
        .with_berger(eta)
        .unwrap();
    let cases = [
        (1, "1.0986122886681096913952452369225257046474905578227"),
        (2, "1.0986122886681096913952452369225257046474905578227"),
        (3, "1.0141036510782550997494571417746391119822989764517"),
        (4, "0.87888983093448775311619618953802056371799244625816"),
        (5, "0.72635523217726260588115387565125666422974582335384"),
        (6, "0.57948780061614577128540408101407949256131370082956"),
    ];
    for (n, decimal) in cases {
        let packet = seq.power_packets(n, n - 1).unwrap();
        let norm = packet.berger().unwrap().inv_t_norm().unwrap();
        let v = norm.finite().expect("packet 1/t-norm is finite");
        assert_encloses(v, decimal, &format!("‖1/t‖ of the ({n}, {})-packet", n - 1));
    }
}

// ==== figure-0 family packets and forced weights ====

#[test]
fn figure0_packet_moments_match_reference() {
    // Bottom-row measure at κ = 1: (1/2)·Leb[0,1] + (1/2)δ_1; the (2,1)
    // packet measure has moments [1, 5/6, 7/9, 3/4, 11/15].
    let p = Figure0Params::from_squares(rat(1, 2), rat_int(1)).unwrap();
    let xi = row0_measure(&p).unwrap().drop_zero_atom();
    let seq = WeightSeq::new(vec![], Tail::FromMeasure(xi.clone()))
        .unwrap()
        .with_berger(xi)
        .unwrap();
    let packet = seq.power_packets(2, 1).unwrap();
    let nu = packet.berger().unwrap();
    let expected = [
        rat_int(1),
        rat(5, 6),
        rat(7, 9),
        rat(3, 4),
        rat(11, 15),
    ];
    for (k, m) in expected.iter().enumerate() {
        assert_eq!(exact(&nu.moment(k as u32)), m, "m_{k} of the (2,1) packet");
    }
    // The first packet weight is the ratio m_1/m_0 = 5/6 = α_1²α_2².
    assert_eq!(exact(&packet.weight_sq(0).unwrap()), &rat(5, 6));
}

#[test]
fn figure0_forced_weight_matches_reference() {
    // Dropping two weights from the bottom-row shift at κ = 1 leaves the
    // measure (s²/γ_2)dξ with ‖1/s‖ = 9/8, forcing α_1² = 8/9 — the
    // printed closed form (k+1)(k+3)/(k+2)² at k = 1.
    let p = Figure0Params::from_squares(rat(1, 2), rat_int(1)).unwrap();
    let xi = row0_measure(&p).unwrap();
    let g2 = xi.moment(2);
    let restricted = xi.t_weight(2, &g2).unwrap();
    let forced = forced_weight_sq(&restricted).unwrap();
    assert_eq!(exact(&forced), &rat(8, 9));
}

// ==== flat family worked example ====

#[test]
fn flat_bound_matches_reference() {
    // ξ = (1/4)δ_0 + (3/4)δ_1, η₁ = δ_1, a² = 1/4, b² = 1, β₀² = 1/2:
    // bound² = 1/3 (the least of the squared terms [2, 1/3, 3, 1]).
    let xi = Measure1D::point_mass(rat_int(0), Scalar::from(rat(1, 4)))
        .unwrap()
        .plus(&Measure1D::point_mass(rat_int(1), Scalar::from(rat(3, 4))).unwrap());
    let p = FlatParams::new(
        rat(1, 4),
        rat_int(1),
        xi,
        Measure1D::dirac(rat_int(1)).unwrap(),
        rat(1, 2),
    )
    .unwrap();
    let rep = closed_form_verdict(&p).unwrap();
    assert_eq!(exact(&rep.term_v_sq), &rat_int(2));
    assert_eq!(exact(rep.term_p_sq.as_ref().unwrap()), &rat(1, 3));
    assert_eq!(exact(&rep.term_q_sq), &rat_int(3));
    assert_eq!(exact(rep.term_n_sq.as_ref().unwrap()), &rat_int(1));
    let bound = rep.bound_sq.as_ref().unwrap();
    assert_eq!(exact(bound), &rat(1, 3));
    assert_encloses(
        &bound.sqrt().unwrap(),
        "0.57735026918962576450914878050195745564760175127012",
        "flat bound",
    );
}
