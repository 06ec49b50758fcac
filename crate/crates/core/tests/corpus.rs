use endmark::divide::{ceil_log2, decide_det_traced};
use endmark::graph::{build_segment_graph, gap_decide, oafa_decide};
use endmark::normal_form::{check_normal_form, normalize_oafa, normalize_onfa};
use endmark::oracle;
use endmark::random::{normal_form_corpus, oafa_corpus, onfa_corpus};
use endmark::reach::ReachController;
use endmark::svfa::{complement_decide, svfa_decide, svfa_enumerate, DEFAULT_BUDGET};
use endmark::{Symbol, Word};

#[test]
fn normalization_preserves_languages() {
    for a in onfa_corpus(101, 60, 5, 2) {
        let b = normalize_onfa(&a).unwrap();
        assert!(b.state_count() <= 3 * a.state_count());
        assert!(check_normal_form(&b, false).holds());
        assert_eq!(oracle::language_difference(&a, &b, 5).unwrap(), None);
    }
}

#[test]
fn alternating_normalization_preserves_languages() {
    for a in oafa_corpus(102, 60, 4, 2) {
        let b = normalize_oafa(&a).unwrap();
        assert!(b.state_count() <= 3 * a.state_count());
        assert!(check_normal_form(&b, true).holds());
        for w in Word::all_up_to(2, 4) {
            assert_eq!(
                oracle::alternating_accepts(&a, &w),
                oracle::alternating_accepts(&b, &w)
            );
        }
    }
}

#[test]
fn controller_agrees_with_segments() {
    for a in normal_form_corpus(103, 40, 5, 2, false) {
        let c = ReachController::new(&a).unwrap();
        assert_eq!(c.state_count(), 4 * a.state_count() - 3);
        for w in Word::all_up_to(2, 4) {
            let rel = oracle::segment_relation(&a, &w);
            for p in a.states() {
                for q in a.states() {
                    let stationary = a.delta(p, Symbol::LeftEnd).iter().any(|t| t.target == q);
                    let segment = rel[p.0].contains(&q) || (stationary && q == c.final_state());
                    assert_eq!(c.segment(&w, p, q), segment);
                    assert_eq!(c.reach(&w, p, q), p == q || segment);
                }
            }
        }
    }
}

#[test]
fn simulations_agree_with_oracle() {
    for a in normal_form_corpus(104, 40, 5, 2, false) {
        for w in Word::all_up_to(2, 4) {
            let expected = oracle::accepts(&a, &w).unwrap();
            let run = decide_det_traced(&a, &w).unwrap();
            assert_eq!(run.value, expected);
            assert!(run.max_depth as u32 <= ceil_log2(a.state_count() as u64 - 1));
            assert_eq!(gap_decide(&build_segment_graph(&a, &w).unwrap()), expected);
            let report = svfa_decide(&a, &w, DEFAULT_BUDGET).unwrap();
            assert!(report.self_verifying());
            assert_eq!(report.verdict_exists_yes, expected);
            assert_eq!(report.verdict_exists_no, !expected);
            assert_eq!(complement_decide(&a, &w).unwrap(), !expected);
        }
    }
}

#[test]
fn counting_matches_enumeration() {
    for a in normal_form_corpus(105, 30, 3, 2, false) {
        for w in Word::all_up_to(2, 2) {
            let Ok(listed) = svfa_enumerate(&a, &w, 200_000) else {
                continue;
            };
            let counted = svfa_decide(&a, &w, DEFAULT_BUDGET).unwrap();
            assert_eq!(listed.accept_count, counted.accept_count);
            assert_eq!(listed.reject_count, counted.reject_count);
            assert_eq!(listed.dont_know_count, counted.dont_know_count);
        }
    }
}

#[test]
fn alternating_graphs_agree_with_oracle() {
    for a in normal_form_corpus(106, 60, 4, 2, true) {
        for w in Word::all_up_to(2, 4) {
            assert_eq!(
                oafa_decide(&a, &w).unwrap(),
                oracle::alternating_accepts(&a, &w)
            );
        }
    }
    for a in oafa_corpus(107, 40, 4, 2) {
        let b = normalize_oafa(&a).unwrap();
        for w in Word::all_up_to(2, 3) {
            assert_eq!(
                oafa_decide(&b, &w).unwrap(),
                oracle::alternating_accepts(&a, &w)
            );
        }
    }
}

#[test]
fn bounded_visits() {
    for a in onfa_corpus(108, 80, 5, 2) {
        for w in Word::all_up_to(2, 4) {
            assert_eq!(
                oracle::accepts(&a, &w).unwrap(),
                oracle::accepts_bounded_visits(&a, &w, a.state_count()).unwrap()
            );
        }
    }
}
