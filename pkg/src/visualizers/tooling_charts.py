"""
Tooling usage across the corpus.

Which test frameworks, linters and coverage tools the packages' test
scripts call.
"""

import pandas as pd
import plotly.express as px
import streamlit as st

TOOL_KINDS = {
    "test_infras": "Test framework",
    "linters": "Linter",
    "coverage_tools": "Coverage tool",
}


def tool_usage(df):
    """
    Count packages per tool.

    Args:
        df: script-level frame from load_results_frame

    Returns:
        DataFrame with columns Kind, Tool, Packages
    """
    frames = []
    for column, kind in TOOL_KINDS.items():
        exploded = df[["package", column]].explode(column).dropna(subset=[column])
        counts = (exploded.drop_duplicates()
                  .groupby(column)["package"].nunique()
                  .rename("Packages").reset_index()
                  .rename(columns={column: "Tool"}))
        counts.insert(0, "Kind", kind)
        frames.append(counts)
    usage = pd.concat(frames, ignore_index=True)
    return usage.sort_values(["Kind", "Packages", "Tool"], ascending=[True, False, True]).reset_index(drop=True)


def plot_tooling(df):
    if df.empty:
        st.warning("No results loaded.")
        return

    usage = tool_usage(df)
    if usage.empty:
        st.info("No known tools found in any test script.")
        return

    st.subheader("🧰 Tooling Usage")
    fig = px.bar(
        usage,
        x="Tool",
        y="Packages",
        color="Kind",
        barmode="group",
        text="Packages",
    )
    fig.update_layout(height=450, xaxis_title="", legend_title="")
    st.plotly_chart(fig, use_container_width=True)

    nested = df[df["test_infras"].apply(len) == 0]
    if not nested.empty:
        st.caption(f"{nested['script'].notna().sum()} test scripts call no known framework directly "
                   "(dispatchers, custom runners, or lint-only scripts).")
