import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
import streamlit as st

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.adversary.refined import RefinedParams, check_chunked_seq, gen_refined_chunks
from src.adversary.universal import coupon_collector_ratio, harmonic
from src.algorithms.registry import available_algorithms
from src.config import LabSettings
from src.harness.experiments import CSV_COLUMNS, experiment_ratio
from src.harness.oracles import oracle_balls_bins, oracle_binom_tail, sweep_case_analysis
from src.harness.verify import verify_chunk_contract
from src.metrics.hst import random_hst

# Page config
st.set_page_config(
    page_title="MSS Lower-Bound Lab",
    page_icon="📐",
    layout="wide",
    initial_sidebar_state="expanded"
)

st.markdown("""
<style>
    .main-header {
        font-size: 2.6rem;
        font-weight: bold;
        text-align: center;
        background: linear-gradient(90deg, #667eea 0%, #764ba2 100%);
        -webkit-background-clip: text;
        -webkit-text-fill-color: transparent;
        margin-bottom: 1.5rem;
    }
    .stProgress > div > div > div > div {
        background: linear-gradient(90deg, #667eea 0%, #764ba2 100%);
    }
</style>
""", unsafe_allow_html=True)

# Initialize session state
if 'table' not in st.session_state:
    st.session_state.table = None
if 'report' not in st.session_state:
    st.session_state.report = None

st.markdown('<h1 class="main-header">📐 MSS Lower-Bound Lab</h1>', unsafe_allow_html=True)
st.markdown("### Race online algorithms against adversarial request distributions")

settings = LabSettings.load()

# Sidebar configuration
with st.sidebar:
    st.header("⚙️ Configuration")

    experiment = st.selectbox(
        "Experiment:",
        ["Ratio growth", "Coupon collector", "Chunk contract", "Oracles"],
    )
    seed = st.number_input("Seed", min_value=0, value=settings.seed, step=1)
    trials = st.number_input("Trials per cell", min_value=2, value=min(settings.trials, 100), step=10)

    if experiment == "Ratio growth":
        st.subheader("📈 Space")
        kind = st.selectbox("Construction", ["refined", "basic", "lgt"])
        levels = st.slider("Levels w", 1, 5, (1, 3))
        algorithms = st.multiselect(
            "Algorithms", available_algorithms(), default=["greedy", "work_function"]
        )
        with st.expander("🔧 Advanced Options"):
            beta = st.number_input("Desk β", min_value=2, value=settings.desk_beta)
            alpha = st.text_input("Desk α", value=str(settings.desk_alpha))
            mode = st.radio("Chunk sizes", ["greedy", "rollout"])
            opt_mode = st.radio("OPT", ["auto", "dp", "certificate"])
            mirrored = st.checkbox("Append the mirrored t→s round", value=False)
    elif experiment == "Coupon collector":
        st.subheader("🎟️ Uniform metric")
        ell = st.number_input("ℓ points", min_value=2, value=8)
        draws = st.number_input("Draws h", min_value=1, value=200)
        algorithms = st.multiselect("Algorithms", available_algorithms(), default=["random_eligible", "greedy"])
    elif experiment == "Chunk contract":
        st.subheader("🧩 Refined level")
        level = st.number_input("w", min_value=1, max_value=4, value=2)
        algorithms = st.multiselect("Algorithms", available_algorithms(), default=["greedy", "path_follower"])
        mode = st.radio("Chunk sizes", ["greedy", "rollout"])
    else:
        st.subheader("🎯 Oracle")
        oracle = st.selectbox("Oracle", ["Balls in bins", "Binomial tail", "Case analysis"])

    st.divider()
    st.subheader("ℹ️ Defaults")
    st.info(f"""
    **Refined β / α:** {settings.refined_beta} / {float(settings.refined_alpha):.3g}
    **Rollouts:** {settings.rollouts} (pool {settings.pool_size})
    **DP budget:** {settings.dp_budget:,} transitions
    """)

st.divider()

if st.button("🚀 Run", type="primary"):
    st.session_state.table = None
    st.session_state.report = None
    progress_bar = st.progress(0)
    status_text = st.empty()
    log_container = st.expander("📋 Processing Log", expanded=True)

    try:
        rng = np.random.default_rng(int(seed))
        if experiment == "Ratio growth":
            lab = LabSettings.load(seed=int(seed), trials=int(trials), desk_beta=int(beta), desk_alpha=Fraction(alpha))
            w_values = list(range(levels[0], levels[1] + 1))
            with log_container:
                st.write(f"🔧 {kind}: w ∈ {w_values}, {int(trials)} trials per cell")

            def report_progress(fraction, message):
                progress_bar.progress(int(100 * fraction))
                status_text.text(message)
                with log_container:
                    st.write(f"✅ {message}")

            table = experiment_ratio(
                kind, w_values, algorithms, int(trials), lab,
                opt_mode=opt_mode, mirrored=mirrored, mode=mode, progress=report_progress,
            )
            st.session_state.table = table
        elif experiment == "Coupon collector":
            status_text.text("🎟️ Sampling draws...")
            result = coupon_collector_ratio(int(ell), int(draws), int(trials), rng, algorithms, budget=settings.dp_budget)
            rows = [
                {"algorithm": name, "mean_cost": result["online"][name], "mean_opt": result["mean_opt"],
                 "ratio": result["ratio"][name], "target": float(harmonic(int(ell) - 1))}
                for name in algorithms
            ]
            st.session_state.table = pd.DataFrame(rows)
        elif experiment == "Chunk contract":
            params = RefinedParams.from_settings(settings, int(level), desk=True, mode=mode)
            seeds = list(range(int(seed), int(seed) + int(trials)))
            status_text.text("🧩 Replaying chunked sequences...")
            report = verify_chunk_contract(
                params, algorithms, seeds, settings.confidence, settings.dp_budget, settings.escape_threshold,
            )
            report["properties"] = check_chunked_seq(gen_refined_chunks(params, rng), params)
            st.session_state.report = report
            st.session_state.table = pd.DataFrame([
                {"algorithm": name, **{k: v for k, v in stats.items() if k != "violations"},
                 "violations": len(stats["violations"])}
                for name, stats in report["algorithms"].items()
            ])
        else:
            if oracle == "Balls in bins":
                rows = [
                    oracle_balls_bins(n, int(np.ceil(n * np.log(n))) * k, int(trials), rng=rng)
                    for n in (2, 4, 8) for k in (1, 4, 16)
                ]
            elif oracle == "Binomial tail":
                rows = [oracle_binom_tail(0.5, 16, d / 10) for d in range(1, 10)]
            else:
                corpus = [random_hst(rng) for _ in range(int(trials))]
                census = sweep_case_analysis(corpus, settings.universal_alpha)
                rows = [{"case": case, "roots": count} for case, count in census["census"].items()]
                st.session_state.report = census
            st.session_state.table = pd.DataFrame(rows)
        progress_bar.progress(100)
        status_text.empty()
        with log_container:
            st.success("✅ Done")

    except Exception as e:
        st.error(f"❌ Error: {str(e)}")
        with log_container:
            st.exception(e)

# Results section
if st.session_state.table is not None:
    st.divider()
    st.markdown("### 📊 Results")
    table = st.session_state.table
    st.dataframe(table, use_container_width=True)

    if {"w", "ratio", "algorithm"} <= set(table.columns):
        st.line_chart(table.pivot(index="w", columns="algorithm", values="ratio"))

    if st.session_state.report is not None:
        with st.expander("🧾 Full report"):
            st.json(json.loads(json.dumps(st.session_state.report, default=str)))

    col_dl1, col_dl2 = st.columns(2)
    with col_dl1:
        columns = [c for c in CSV_COLUMNS if c in table.columns] or list(table.columns)
        st.download_button("⬇️ Download CSV", table[columns].to_csv(index=False), file_name="results.csv", mime="text/csv")
    with col_dl2:
        st.download_button("⬇️ Download JSON", table.to_json(orient="records", indent=2), file_name="results.json", mime="application/json")

st.divider()
st.markdown("""
<div style='text-align: center; color: #666; padding: 1.5rem;'>
    <p>Made with Streamlit | exact rational arithmetic, seeded Monte Carlo</p>
</div>
""", unsafe_allow_html=True)
