"""
Analyze JavaScript packages given as repository links.

    python diagnose_github_repo.py [--repo_list_file FILE] [--repo_link URL]
        [--repo_link_and_SHA URL SHA] [--config FILE] [--output_dir DIR]
"""

import sys

from src.cli import diagnose_github_repos

if __name__ == "__main__":
    sys.exit(diagnose_github_repos())
