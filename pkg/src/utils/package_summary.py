"""
Package summary utilities.

Pulls together what users want to see first about one analyzed package:
how it installed, whether it built, and how its tests went.
"""


def _install_status(installation):
    if not installation:
        return "Not attempted"
    if installation.get("timed_out"):
        return "Timed out"
    if installation.get("ERROR"):
        return "Failed"
    return "OK"


def _build_status(build):
    if build is None:
        return "Not tracked"
    if build.get("bailed"):
        return f"Bailed ({', '.join(build.get('failed_scripts', []))} never succeeded)"
    if build.get("ERROR"):
        return "Failed"
    if not build.get("build_script_list"):
        return "No build scripts"
    return f"OK ({len(build['build_script_list'])} scripts)"


def get_package_summary(doc):
    """
    Get the essential info for one results document.

    Args:
        doc: parsed <package>__results.json

    Returns:
        Dictionary with the package highlights ready for display
    """
    summary = {}

    installation = doc.get("installation")
    summary["Installer"] = (installation or {}).get("installer_command", "N/A")
    summary["Install status"] = _install_status(installation)
    summary["Build"] = _build_status(doc.get("build"))

    testing = doc.get("testing")
    if testing is None:
        summary["Tests"] = "Not tracked"
        summary["Frameworks"] = []
    else:
        passing = sum(r.get("num_passing", 0) for r in testing.values())
        failing = sum(r.get("num_failing", 0) for r in testing.values())
        summary["Tests"] = f"{passing} passing, {failing} failing"
        summary["Frameworks"] = sorted({f for r in testing.values() for f in r.get("test_infras", [])})

    # Where the code came from
    metadata = doc.get("metadata") or {}
    link = metadata.get("repo_link", "N/A")
    sha = metadata.get("repo_commit_SHA")
    summary["Repository"] = f"{link}@{sha}" if sha else link

    if doc.get("setup_error"):
        summary["Setup error"] = doc["setup_error"]

    return summary
