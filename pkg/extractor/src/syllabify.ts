/** Phone-level forced alignments to syllable spans.
 *
 * Every vowel is a nucleus. Consonants between two nuclei split by onset
 * maximization: the longest cluster valid as an onset (per the rule table)
 * attaches to the following syllable, the rest closes the previous one.
 * Silence labels break syllable grouping. The rule table is a data file,
 * not a constant, because syllabification conventions differ per corpus.
 */

import { readFileSync } from 'node:fs'

import { AlignmentEntry, validateEntries } from './alignment.js'

export interface PhoneEntry {
	startSec: number
	endSec: number
	phone: string
}

export interface RuleTable {
	vowels: Set<string>
	validOnsets: Set<string>
	silenceLabels: Set<string>
}

export class SyllabifyError extends Error {}

export function parseRuleTable(json: string): RuleTable {
	const raw = JSON.parse(json)
	for (const key of ['vowels', 'validOnsets']) {
		if (!Array.isArray(raw[key])) {
			throw new SyllabifyError(`rule table must list ${key}`)
		}
	}
	return {
		vowels: new Set<string>(raw.vowels.map((v: string) => v.toUpperCase())),
		validOnsets: new Set<string>((raw.validOnsets as string[]).map(o => o.toUpperCase())),
		silenceLabels: new Set<string>(((raw.silenceLabels ?? ['SIL', 'SP', 'SPN', '']) as string[])
			.map(s => s.toUpperCase())),
	}
}

export function loadRuleTable(path: string): RuleTable {
	return parseRuleTable(readFileSync(path, 'utf-8'))
}

/** Strip stress digits: AH0 -> AH. */
export function basePhone(phone: string): string {
	return phone.toUpperCase().replace(/[0-9]+$/, '')
}

export function parsePhoneFile(text: string): PhoneEntry[] {
	const entries: PhoneEntry[] = []
	for (const [index, raw] of text.split('\n').entries()) {
		const line = raw.trim()
		if (!line || line.startsWith('#')) {
			continue
		}
		const fields = line.split('\t')
		if (fields.length !== 3) {
			throw new SyllabifyError(`line ${index + 1}: expected start<TAB>end<TAB>phone`)
		}
		const startSec = Number(fields[0])
		const endSec = Number(fields[1])
		if (Number.isNaN(startSec) || Number.isNaN(endSec) || !(startSec < endSec)) {
			throw new SyllabifyError(`line ${index + 1}: bad time span`)
		}
		entries.push({ startSec, endSec, phone: fields[2] })
	}
	let prevEnd = -Infinity
	for (const entry of entries) {
		if (entry.startSec < prevEnd) {
			throw new SyllabifyError(`overlapping phone spans at ${entry.startSec}`)
		}
		prevEnd = entry.endSec
	}
	return entries
}

function splitCluster(cluster: PhoneEntry[], rules: RuleTable): number {
	// Index where the next syllable's onset starts: maximize the onset.
	for (let start = 0; start < cluster.length; start++) {
		const onset = cluster.slice(start).map(p => basePhone(p.phone)).join(' ')
		if (rules.validOnsets.has(onset)) {
			return start
		}
	}
	return cluster.length // no legal onset: everything is coda
}

function syllabifyGroup(group: PhoneEntry[], rules: RuleTable): AlignmentEntry[] {
	const nuclei = group
		.map((entry, index) => ({ entry, index }))
		.filter(({ entry }) => rules.vowels.has(basePhone(entry.phone)))
		.map(({ index }) => index)
	if (nuclei.length === 0) {
		// consonant-only group (e.g. hesitation noise): one span, no nucleus
		return [toEntry(group)]
	}
	const syllables: PhoneEntry[][] = []
	let cursor = 0
	for (let s = 0; s < nuclei.length; s++) {
		const nucleus = nuclei[s]
		if (s === 0) {
			cursor = 0 // leading consonants join the first syllable
		}
		const last = s + 1 < nuclei.length
			? nucleus + splitCluster(group.slice(nucleus + 1, nuclei[s + 1]), rules)
			: group.length - 1
		syllables.push(group.slice(cursor, last + 1))
		cursor = last + 1
	}
	return syllables.map(toEntry)
}

function toEntry(phones: PhoneEntry[]): AlignmentEntry {
	return {
		startSec: phones[0].startSec,
		endSec: phones[phones.length - 1].endSec,
		label: phones.map(p => basePhone(p.phone)).join('-'),
	}
}

/** Convert a phone alignment into syllable spans. */
export function syllabify(phones: PhoneEntry[], rules: RuleTable): AlignmentEntry[] {
	const groups: PhoneEntry[][] = []
	let current: PhoneEntry[] = []
	for (const entry of phones) {
		if (rules.silenceLabels.has(basePhone(entry.phone))) {
			if (current.length) {
				groups.push(current)
				current = []
			}
			continue
		}
		current.push(entry)
	}
	if (current.length) {
		groups.push(current)
	}
	const syllables = groups.flatMap(group => syllabifyGroup(group, rules))
	validateEntries(syllables)
	return syllables
}
