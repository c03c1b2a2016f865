//! The GitHub REST routes the extractor touches.

use super::ApiRequest;

pub fn search_repositories(topic: &str) -> ApiRequest {
    ApiRequest::new("/search/repositories")
        .param("q", topic)
        .param("sort", "stars")
        .param("order", "desc")
}

pub fn repository(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}"))
}

pub fn languages(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/languages"))
}

pub fn contributors(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/contributors"))
}

pub fn releases(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/releases"))
}

pub fn pulls(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/pulls")).param("state", "all")
}

pub fn issues(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/issues")).param("state", "all")
}

pub fn issue_comments(full_name: &str, number: u64) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/issues/{number}/comments"))
}

pub fn subscribers(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/subscribers"))
}

pub fn commits(full_name: &str) -> ApiRequest {
    ApiRequest::new(format!("/repos/{full_name}/commits"))
}

pub fn user(login: &str) -> ApiRequest {
    ApiRequest::new(format!("/users/{login}"))
}

pub fn user_repos(login: &str) -> ApiRequest {
    ApiRequest::new(format!("/users/{login}/repos"))
}

/// Route family of a request path, used to classify request logs.
pub fn route_kind(path: &str) -> &'static str {
    let segments: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    match segments.as_slice() {
        ["search", "repositories"] => "search",
        ["repos", _, _] => "repository",
        ["repos", _, _, "issues", _, "comments"] => "issue_comments",
        ["repos", _, _, kind] => match *kind {
            "languages" => "languages",
            "contributors" => "contributors",
            "releases" => "releases",
            "pulls" => "pulls",
            "issues" => "issues",
            "subscribers" => "subscribers",
            "commits" => "commits",
            _ => "other",
        },
        ["users", _] => "user",
        ["users", _, "repos"] => "user_repos",
        _ => "other",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds() {
        assert_eq!(route_kind("/repos/a/b/issues/3/comments"), "issue_comments");
        assert_eq!(route_kind("/repos/a/b/pulls"), "pulls");
        assert_eq!(route_kind("/repos/a/b"), "repository");
        assert_eq!(route_kind("/users/x/repos"), "user_repos");
        assert_eq!(route_kind("/rate_limit"), "other");
    }

    #[test]
    fn pulls_and_issues_request_all_states() {
        assert!(pulls("a/b").request_line().contains("state=all"));
        assert!(issues("a/b").request_line().contains("state=all"));
    }
}
