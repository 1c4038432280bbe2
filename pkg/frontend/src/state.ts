/** View state and its legal transitions. The selected cluster must exist in
 * the delivered cluster list; k stays nonnegative. */

export interface ViewState {
  activeDomain: string;
  selectedCluster: number | null;
  queryText: string;
  k: number;
  graphTauView: number;
}

export function initialState(domain: string, serverTau: number): ViewState {
  return {
    activeDomain: domain,
    selectedCluster: null,
    queryText: "",
    k: 5,
    graphTauView: serverTau,
  };
}

export function selectCluster(
  state: ViewState,
  cluster: number | null,
  delivered: number[],
): ViewState {
  if (cluster !== null && !delivered.includes(cluster)) {
    throw new Error(`cluster ${cluster} is not in the delivered list`);
  }
  return { ...state, selectedCluster: cluster };
}

export function setK(state: ViewState, k: number): ViewState {
  if (!Number.isInteger(k) || k < 0) {
    throw new Error(`k must be a nonnegative integer, got ${k}`);
  }
  return { ...state, k };
}

export function setQueryText(state: ViewState, text: string): ViewState {
  return { ...state, queryText: text };
}

export function setTauView(state: ViewState, tau: number): ViewState {
  return { ...state, graphTauView: tau };
}

export function switchDomain(state: ViewState, domain: string): ViewState {
  return { ...state, activeDomain: domain, selectedCluster: null };
}
