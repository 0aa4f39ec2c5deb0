import type { ControllerSnapshot } from "./controller.js";
import { GatewayError } from "./api.js";
import type {
  Candidate,
  FragmentScores,
  SessionJson,
  SubTranslationRow,
  ViewModel,
} from "./types.js";

/**
 * Project a session payload onto the three page views. Every field is copied
 * from the gateway response; nothing is recomputed here.
 */
export function toViewModel(session: SessionJson): ViewModel {
  const scoresByFragment = new Map<string, FragmentScores>();
  for (const scores of session.lastResult?.subTranslations ?? []) {
    scoresByFragment.set(scores.fragment, scores);
  }
  const rows: SubTranslationRow[] = session.subTranslations.map((entry) => ({
    fragment: entry.fragment,
    fragmentHash: entry.fragmentHash,
    formulaText: entry.formulaText,
    confidence: entry.confidence,
    alternatives: scoresByFragment.get(entry.fragment)?.alternatives ?? [],
    locked: entry.locked,
  }));
  const result = session.lastResult;
  return {
    promptView: {
      nl: session.nl,
      backendId: session.settings.backendId,
      templateId: session.settings.templateId,
      temperature: session.settings.temperature,
      runs: session.settings.runs,
    },
    subTranslationView: rows,
    finalView: result
      ? {
          formulaText: result.final.formula,
          confidence: result.final.confidence,
          alternatives: result.finalAlternatives,
          approved: session.status === "approved",
        }
      : null,
  };
}

export function formatConfidence(value: number | null): string {
  return value === null ? "n/a" : value.toFixed(2);
}

/** Callbacks the page wires to the controller; one callback is one user action. */
export interface ActionHandlers {
  onCreate(nl: string): void;
  onTranslate(): void;
  onApprove(): void;
  onAdd(fragment: string, formulaText: string): void;
  onEdit(fragmentHash: string, formulaText: string): void;
  onDelete(fragmentHash: string): void;
  /** index is the server's candidate index: 0 is the current best, 1.. are alternatives. */
  onSelect(target: string, index: number): void;
}

/**
 * Renders the whole page from a controller snapshot. The DOM is rebuilt on
 * every render so it can only ever show what the server last said.
 */
export class WorkbenchView {
  constructor(
    private readonly root: HTMLElement,
    private readonly actions: ActionHandlers,
  ) {}

  render(snapshot: ControllerSnapshot): void {
    this.root.textContent = "";
    this.root.appendChild(this.errorBanner(snapshot.error));
    if (snapshot.session === null) {
      this.root.appendChild(this.createForm(snapshot.pending));
      return;
    }
    const model = toViewModel(snapshot.session);
    const approved = snapshot.session.status === "approved";
    this.root.appendChild(this.promptView(model, snapshot.pending, approved));
    this.root.appendChild(this.subTranslationsView(model, snapshot.pending, approved));
    this.root.appendChild(this.finalResultView(model, snapshot.pending));
  }

  private errorBanner(error: Error | null): HTMLElement {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    if (error === null) {
      banner.hidden = true;
      return banner;
    }
    banner.textContent =
      error instanceof GatewayError ? `${error.code}: ${error.message}` : error.message;
    return banner;
  }

  private createForm(pending: boolean): HTMLElement {
    const section = document.createElement("section");
    section.className = "create-view";
    const heading = document.createElement("h2");
    heading.textContent = "New translation";
    const input = document.createElement("textarea");
    input.className = "nl-input";
    input.placeholder = "Describe the requirement in natural language";
    const button = document.createElement("button");
    button.className = "create-button";
    button.textContent = "Start session";
    button.disabled = pending;
    button.addEventListener("click", () => {
      if (input.value.trim() !== "") {
        this.actions.onCreate(input.value);
      }
    });
    section.append(heading, input, button);
    return section;
  }

  private promptView(model: ViewModel, pending: boolean, approved: boolean): HTMLElement {
    const section = document.createElement("section");
    section.className = "prompt-view";
    const heading = document.createElement("h2");
    heading.textContent = "Prompt";
    const nl = document.createElement("p");
    nl.className = "nl-text";
    nl.textContent = model.promptView.nl;
    const settings = document.createElement("dl");
    settings.className = "settings";
    const pairs: Array<[string, string]> = [
      ["backend", model.promptView.backendId],
      ["template", model.promptView.templateId],
      ["temperature", String(model.promptView.temperature)],
      ["runs", String(model.promptView.runs)],
    ];
    for (const [label, value] of pairs) {
      const dt = document.createElement("dt");
      dt.textContent = label;
      const dd = document.createElement("dd");
      dd.textContent = value;
      settings.append(dt, dd);
    }
    const translate = document.createElement("button");
    translate.className = "translate-button";
    translate.textContent = "Translate";
    translate.disabled = pending || approved;
    translate.addEventListener("click", () => this.actions.onTranslate());
    section.append(heading, nl, settings, translate);
    return section;
  }

  private subTranslationsView(
    model: ViewModel,
    pending: boolean,
    approved: boolean,
  ): HTMLElement {
    const section = document.createElement("section");
    section.className = "subtranslation-view";
    const heading = document.createElement("h2");
    heading.textContent = "Sub-translations";

    // row controls need rows to act on; adding is how a draft gets its first one
    const rowsFieldset = document.createElement("fieldset");
    rowsFieldset.className = "subtranslation-rows";
    rowsFieldset.disabled = pending || approved || model.subTranslationView.length === 0;
    const table = document.createElement("table");
    table.className = "subtranslation-table";
    for (const row of model.subTranslationView) {
      table.appendChild(this.subTranslationRow(row));
    }
    rowsFieldset.appendChild(table);

    const addFieldset = document.createElement("fieldset");
    addFieldset.className = "add-controls";
    addFieldset.disabled = pending || approved;
    const addBar = document.createElement("div");
    addBar.className = "add-bar";
    const fragmentInput = document.createElement("input");
    fragmentInput.className = "fragment-input";
    fragmentInput.placeholder = "fragment";
    const formulaInput = document.createElement("input");
    formulaInput.className = "formula-input";
    formulaInput.placeholder = "formula";
    const addButton = document.createElement("button");
    addButton.className = "add-button";
    addButton.textContent = "Add";
    addButton.addEventListener("click", () => {
      if (fragmentInput.value.trim() !== "" && formulaInput.value.trim() !== "") {
        this.actions.onAdd(fragmentInput.value, formulaInput.value);
      }
    });
    addBar.append(fragmentInput, formulaInput, addButton);
    addFieldset.appendChild(addBar);

    section.append(heading, rowsFieldset, addFieldset);
    return section;
  }

  private subTranslationRow(row: SubTranslationRow): HTMLElement {
    const tr = document.createElement("tr");
    tr.className = "subtranslation-row";
    tr.dataset["fragmentHash"] = row.fragmentHash;

    const fragmentCell = document.createElement("td");
    fragmentCell.className = "fragment";
    fragmentCell.textContent = row.fragment;

    const formulaCell = document.createElement("td");
    const formula = document.createElement("code");
    formula.className = "formula";
    formula.textContent = row.formulaText;
    formulaCell.appendChild(formula);

    const confidenceCell = document.createElement("td");
    confidenceCell.className = "confidence";
    confidenceCell.textContent = formatConfidence(row.confidence);

    const lockedCell = document.createElement("td");
    lockedCell.className = "locked-marker";
    lockedCell.textContent = row.locked ? "locked" : "";

    const alternativesCell = document.createElement("td");
    alternativesCell.appendChild(
      this.alternativesDropdown(row.formulaText, row.alternatives, (index) =>
        this.actions.onSelect(row.fragmentHash, index),
      ),
    );

    const controlsCell = document.createElement("td");
    const editInput = document.createElement("input");
    editInput.className = "edit-input";
    editInput.value = row.formulaText;
    const saveButton = document.createElement("button");
    saveButton.className = "save-button";
    saveButton.textContent = "Save";
    saveButton.addEventListener("click", () => {
      if (editInput.value.trim() !== "") {
        this.actions.onEdit(row.fragmentHash, editInput.value);
      }
    });
    const deleteButton = document.createElement("button");
    deleteButton.className = "delete-button";
    deleteButton.textContent = "Delete";
    deleteButton.addEventListener("click", () => this.actions.onDelete(row.fragmentHash));
    controlsCell.append(editInput, saveButton, deleteButton);

    tr.append(
      fragmentCell,
      formulaCell,
      confidenceCell,
      lockedCell,
      alternativesCell,
      controlsCell,
    );
    return tr;
  }

  /**
   * Option values carry the server's candidate index ([best, alternatives...]),
   * so a pick posts the index unchanged. The first option is the row as shown.
   */
  private alternativesDropdown(
    current: string,
    alternatives: Candidate[],
    onPick: (index: number) => void,
  ): HTMLElement {
    const select = document.createElement("select");
    select.className = "alternatives";
    const currentOption = document.createElement("option");
    currentOption.value = "";
    currentOption.textContent = `${current} (current)`;
    currentOption.selected = true;
    select.appendChild(currentOption);
    alternatives.forEach((candidate, position) => {
      const option = document.createElement("option");
      option.value = String(position + 1);
      option.textContent = `${candidate.formula} [${formatConfidence(candidate.confidence)}]`;
      select.appendChild(option);
    });
    select.disabled = alternatives.length === 0;
    select.addEventListener("change", () => {
      if (select.value !== "") {
        onPick(Number(select.value));
      }
    });
    return select;
  }

  private finalResultView(model: ViewModel, pending: boolean): HTMLElement {
    const section = document.createElement("section");
    section.className = "final-view";
    const heading = document.createElement("h2");
    heading.textContent = "Final Result";
    const fieldset = document.createElement("fieldset");
    fieldset.className = "final-controls";
    section.append(heading, fieldset);

    const view = model.finalView;
    if (view === null) {
      fieldset.disabled = true;
      const note = document.createElement("p");
      note.textContent = "No translation yet.";
      fieldset.appendChild(note);
      return section;
    }

    const formula = document.createElement("code");
    formula.className = "formula final-formula";
    formula.textContent = view.formulaText;

    const confidence = document.createElement("span");
    confidence.className = "confidence final-confidence";
    confidence.textContent = formatConfidence(view.confidence);

    const dropdown = this.alternativesDropdown(view.formulaText, view.alternatives, (index) =>
      this.actions.onSelect("final", index),
    );

    const approveButton = document.createElement("button");
    approveButton.className = "approve-button";
    approveButton.textContent = view.approved ? "Approved" : "Approve";
    approveButton.addEventListener("click", () => this.actions.onApprove());

    const approvedMarker = document.createElement("span");
    approvedMarker.className = "approved-marker";
    approvedMarker.textContent = view.approved ? "approved" : "";

    fieldset.append(formula, confidence, dropdown, approveButton, approvedMarker);
    // an approved session is frozen; the view locks with it
    fieldset.disabled = pending || view.approved;
    approveButton.disabled = pending || view.approved;
    return section;
  }
}
