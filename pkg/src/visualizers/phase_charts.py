"""
Where packages drop out.

Shows how far each package got: setup, install, tests.
"""

import plotly.express as px
import streamlit as st

from src.visualizers.test_outcome_charts import OUTCOME_COLORS, outcome_counts


def build_outcome_figure(totals):
    counts = outcome_counts(totals).reset_index()
    counts.columns = ["Outcome", "Packages"]
    fig = px.bar(
        counts,
        x="Outcome",
        y="Packages",
        color="Outcome",
        color_discrete_map=OUTCOME_COLORS,
        text="Packages",
    )
    fig.update_layout(height=450, showlegend=False, xaxis_title="", yaxis_title="Packages")
    fig.update_yaxes(gridcolor="rgba(128,128,128,0.2)")
    return fig


def plot_outcome_breakdown(totals):
    if totals.empty:
        st.warning("No results loaded.")
        return

    st.caption("How far each package got through the analysis")
    st.plotly_chart(build_outcome_figure(totals), use_container_width=True)

    # explanation
    st.write("Setup failures mean the repository couldn't be found or cloned. "
             "Install failures usually come from native dependencies or old Node versions. "
             "\"No tests run\" covers packages without test scripts and suites whose output we couldn't read.")
