"""
npm package test-suite explorer.

Browse a directory of <package>__results.json files produced by
diagnose_npm_package.py / diagnose_github_repo.py, and pick out the
packages whose tests actually run. Read-only: nothing here runs an analysis.
"""

import json
import os

import streamlit as st

from src.core.corpus_analyzer import (
    filter_corpus,
    load_results_documents,
    package_totals,
    results_to_frame,
)
from src.parsers.tool_catalog import FRAMEWORKS
from src.utils.package_summary import get_package_summary
from src.visualizers.phase_charts import plot_outcome_breakdown
from src.visualizers.test_outcome_charts import plot_test_outcomes
from src.visualizers.tooling_charts import plot_tooling

# -----------------------------------------------------------------------------
# Loading
# -----------------------------------------------------------------------------

DEFAULT_RESULTS_DIR = os.environ.get("NPM_MINER_RESULTS_DIR", ".")


@st.cache_data(show_spinner="Reading results files...")
def load_corpus(results_dir):
    """Parsed documents plus the script-level frame for a results directory."""
    docs = load_results_documents(results_dir)
    return docs, results_to_frame(docs)

# -----------------------------------------------------------------------------
# Main App Structure
# -----------------------------------------------------------------------------


def main():
    st.set_page_config(page_title="npm Test Suite Explorer", layout="wide", page_icon="📦")

    # --- Sidebar Configuration ---
    with st.sidebar:
        st.header("📂 Results")
        results_dir = st.text_input("Results directory", value=DEFAULT_RESULTS_DIR)
        if st.button("Reload"):
            load_corpus.clear()

        st.divider()
        st.header("🔎 Filter")
        min_passing = st.number_input("Minimum passing tests", min_value=0, value=1, step=1)
        allow_failing = st.checkbox("Allow failing tests", value=False)
        exclude_timed_out = st.checkbox("Exclude timed-out test commands", value=True)
        frameworks = st.multiselect("Test frameworks", sorted(FRAMEWORKS))

    if not os.path.isdir(results_dir):
        st.error(f"{results_dir} is not a directory.")
        return

    docs, df = load_corpus(results_dir)

    st.title("📦 npm Test Suite Explorer")
    if not docs:
        st.info("No results files found. Run diagnose_npm_package.py or diagnose_github_repo.py first.")
        return

    totals = package_totals(df)
    st.caption(f"{len(docs)} packages in {os.path.abspath(results_dir)}")

    tab1, tab2, tab3, tab4, tab5 = st.tabs([
        "📊 Outcomes", "🧪 Test Results", "🧰 Tooling", "📋 Package Detail", "✅ Filtered List"
    ])

    with tab1:
        plot_outcome_breakdown(totals)

    with tab2:
        plot_test_outcomes(totals)

    with tab3:
        plot_tooling(df)

    with tab4:
        package = st.selectbox("Package", sorted(docs), key="detail")
        doc = docs[package]
        for label, value in get_package_summary(doc).items():
            if isinstance(value, list):
                value = ", ".join(value) or "-"
            st.markdown(f"**{label}**: {value}")
        with st.expander("Raw results", expanded=False):
            st.json(doc)

    with tab5:
        selected = filter_corpus(
            df,
            min_passing=int(min_passing),
            allow_failing=allow_failing,
            frameworks=frameworks or None,
            exclude_timed_out=exclude_timed_out,
        )
        st.subheader(f"{len(selected)} packages match")
        if selected:
            st.dataframe(totals[totals["package"].isin(selected)][
                ["package", "num_passing", "num_failing", "Outcome"]
            ], use_container_width=True, hide_index=True)
            st.download_button(
                "Download list",
                data="\n".join(selected) + "\n",
                file_name="filtered_packages.txt",
            )
            st.download_button(
                "Download as JSON",
                data=json.dumps(selected, indent=4),
                file_name="filtered_packages.json",
            )


if __name__ == "__main__":
    main()
