from popmatch.experiments import CorpusConfig, cross_check, manipulation_survey


def test_cross_check_small_corpus():
    rep = cross_check(CorpusConfig(count=40, max_agents=4, max_posts=4, seed=5))
    assert rep.ok and rep.instances == 40
    assert rep.as_dict()["ok"] is True


def test_survey_rows_follow_tie_probs():
    cfg = CorpusConfig(count=30, max_agents=4, max_posts=4, seed=6, min_size=2)
    rows = manipulation_survey(cfg, verify=True)
    assert [r.tie_prob for r in rows] == [0.0, 0.3, 0.6]
    assert sum(r.instances for r in rows) <= 30
