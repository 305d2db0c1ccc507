var B=globalThis,Z=n=>n,N=B.trustedTypes,K=N?N.createPolicy("lit-html",{createHTML:n=>n}):void 0,ie="$lit$",v=`lit$${Math.random().toFixed(9).slice(2)}$`,ne="?"+v,ce=`<${ne}>`,x=document,T=()=>x.createComment(""),R=n=>n===null||typeof n!="object"&&typeof n!="function",j=Array.isArray,le=n=>j(n)||typeof n?.[Symbol.iterator]=="function",I=`[ 	
\f\r]`,S=/<(?:(!--|\/[^a-zA-Z])|(\/?[a-zA-Z][^>\s]*)|(\/?$))/g,X=/-->/g,Q=/>/g,A=RegExp(`>|${I}(?:([^\\s"'>=/]+)(${I}*=${I}*(?:[^ 	
\f\r"'\`<>=]|("|')|))|$)`,"g"),ee=/'/g,te=/"/g,re=/^(?:script|style|textarea|title)$/i,G=n=>(e,...t)=>({_$litType$:n,strings:e,values:t}),c=G(1),fe=G(2),$e=G(3),C=Symbol.for("lit-noChange"),l=Symbol.for("lit-nothing"),se=new WeakMap,w=x.createTreeWalker(x,129);function ae(n,e){if(!j(n)||!n.hasOwnProperty("raw"))throw Error("invalid template strings array");return K!==void 0?K.createHTML(e):e}var he=(n,e)=>{let t=n.length-1,s=[],i,r=e===2?"<svg>":e===3?"<math>":"",a=S;for(let u=0;u<t;u++){let o=n[u],d,p,h=-1,$=0;for(;$<o.length&&(a.lastIndex=$,p=a.exec(o),p!==null);)$=a.lastIndex,a===S?p[1]==="!--"?a=X:p[1]!==void 0?a=Q:p[2]!==void 0?(re.test(p[2])&&(i=RegExp("</"+p[2],"g")),a=A):p[3]!==void 0&&(a=A):a===A?p[0]===">"?(a=i??S,h=-1):p[1]===void 0?h=-2:(h=a.lastIndex-p[2].length,d=p[1],a=p[3]===void 0?A:p[3]==='"'?te:ee):a===te||a===ee?a=A:a===X||a===Q?a=S:(a=A,i=void 0);let g=a===A&&n[u+1].startsWith("/>")?" ":"";r+=a===S?o+ce:h>=0?(s.push(d),o.slice(0,h)+ie+o.slice(h)+v+g):o+v+(h===-2?u:g)}return[ae(n,r+(n[t]||"<?>")+(e===2?"</svg>":e===3?"</math>":"")),s]},H=class n{constructor({strings:e,_$litType$:t},s){let i;this.parts=[];let r=0,a=0,u=e.length-1,o=this.parts,[d,p]=he(e,t);if(this.el=n.createElement(d,s),w.currentNode=this.el.content,t===2||t===3){let h=this.el.content.firstChild;h.replaceWith(...h.childNodes)}for(;(i=w.nextNode())!==null&&o.length<u;){if(i.nodeType===1){if(i.hasAttributes())for(let h of i.getAttributeNames())if(h.endsWith(ie)){let $=p[a++],g=i.getAttribute(h).split(v),k=/([.?@])?(.*)/.exec($);o.push({type:1,index:r,name:k[2],strings:g,ctor:k[1]==="."?L:k[1]==="?"?F:k[1]==="@"?U:M}),i.removeAttribute(h)}else h.startsWith(v)&&(o.push({type:6,index:r}),i.removeAttribute(h));if(re.test(i.tagName)){let h=i.textContent.split(v),$=h.length-1;if($>0){i.textContent=N?N.emptyScript:"";for(let g=0;g<$;g++)i.append(h[g],T()),w.nextNode(),o.push({type:2,index:++r});i.append(h[$],T())}}}else if(i.nodeType===8)if(i.data===ne)o.push({type:2,index:r});else{let h=-1;for(;(h=i.data.indexOf(v,h+1))!==-1;)o.push({type:7,index:r}),h+=v.length-1}r++}}static createElement(e,t){let s=x.createElement("template");return s.innerHTML=e,s}};function E(n,e,t=n,s){if(e===C)return e;let i=s!==void 0?t._$Co?.[s]:t._$Cl,r=R(e)?void 0:e._$litDirective$;return i?.constructor!==r&&(i?._$AO?.(!1),r===void 0?i=void 0:(i=new r(n),i._$AT(n,t,s)),s!==void 0?(t._$Co??=[])[s]=i:t._$Cl=i),i!==void 0&&(e=E(n,i._$AS(n,e.values),i,s)),e}var O=class{constructor(e,t){this._$AV=[],this._$AN=void 0,this._$AD=e,this._$AM=t}get parentNode(){return this._$AM.parentNode}get _$AU(){return this._$AM._$AU}u(e){let{el:{content:t},parts:s}=this._$AD,i=(e?.creationScope??x).importNode(t,!0);w.currentNode=i;let r=w.nextNode(),a=0,u=0,o=s[0];for(;o!==void 0;){if(a===o.index){let d;o.type===2?d=new V(r,r.nextSibling,this,e):o.type===1?d=new o.ctor(r,o.name,o.strings,this,e):o.type===6&&(d=new D(r,this,e)),this._$AV.push(d),o=s[++u]}a!==o?.index&&(r=w.nextNode(),a++)}return w.currentNode=x,i}p(e){let t=0;for(let s of this._$AV)s!==void 0&&(s.strings!==void 0?(s._$AI(e,s,t),t+=s.strings.length-2):s._$AI(e[t])),t++}},V=class n{get _$AU(){return this._$AM?._$AU??this._$Cv}constructor(e,t,s,i){this.type=2,this._$AH=l,this._$AN=void 0,this._$AA=e,this._$AB=t,this._$AM=s,this.options=i,this._$Cv=i?.isConnected??!0}get parentNode(){let e=this._$AA.parentNode,t=this._$AM;return t!==void 0&&e?.nodeType===11&&(e=t.parentNode),e}get startNode(){return this._$AA}get endNode(){return this._$AB}_$AI(e,t=this){e=E(this,e,t),R(e)?e===l||e==null||e===""?(this._$AH!==l&&this._$AR(),this._$AH=l):e!==this._$AH&&e!==C&&this._(e):e._$litType$!==void 0?this.$(e):e.nodeType!==void 0?this.T(e):le(e)?this.k(e):this._(e)}O(e){return this._$AA.parentNode.insertBefore(e,this._$AB)}T(e){this._$AH!==e&&(this._$AR(),this._$AH=this.O(e))}_(e){this._$AH!==l&&R(this._$AH)?this._$AA.nextSibling.data=e:this.T(x.createTextNode(e)),this._$AH=e}$(e){let{values:t,_$litType$:s}=e,i=typeof s=="number"?this._$AC(e):(s.el===void 0&&(s.el=H.createElement(ae(s.h,s.h[0]),this.options)),s);if(this._$AH?._$AD===i)this._$AH.p(t);else{let r=new O(i,this),a=r.u(this.options);r.p(t),this.T(a),this._$AH=r}}_$AC(e){let t=se.get(e.strings);return t===void 0&&se.set(e.strings,t=new H(e)),t}k(e){j(this._$AH)||(this._$AH=[],this._$AR());let t=this._$AH,s,i=0;for(let r of e)i===t.length?t.push(s=new n(this.O(T()),this.O(T()),this,this.options)):s=t[i],s._$AI(r),i++;i<t.length&&(this._$AR(s&&s._$AB.nextSibling,i),t.length=i)}_$AR(e=this._$AA.nextSibling,t){for(this._$AP?.(!1,!0,t);e!==this._$AB;){let s=Z(e).nextSibling;Z(e).remove(),e=s}}setConnected(e){this._$AM===void 0&&(this._$Cv=e,this._$AP?.(e))}},M=class{get tagName(){return this.element.tagName}get _$AU(){return this._$AM._$AU}constructor(e,t,s,i,r){this.type=1,this._$AH=l,this._$AN=void 0,this.element=e,this.name=t,this._$AM=i,this.options=r,s.length>2||s[0]!==""||s[1]!==""?(this._$AH=Array(s.length-1).fill(new String),this.strings=s):this._$AH=l}_$AI(e,t=this,s,i){let r=this.strings,a=!1;if(r===void 0)e=E(this,e,t,0),a=!R(e)||e!==this._$AH&&e!==C,a&&(this._$AH=e);else{let u=e,o,d;for(e=r[0],o=0;o<r.length-1;o++)d=E(this,u[s+o],t,o),d===C&&(d=this._$AH[o]),a||=!R(d)||d!==this._$AH[o],d===l?e=l:e!==l&&(e+=(d??"")+r[o+1]),this._$AH[o]=d}a&&!i&&this.j(e)}j(e){e===l?this.element.removeAttribute(this.name):this.element.setAttribute(this.name,e??"")}},L=class extends M{constructor(){super(...arguments),this.type=3}j(e){this.element[this.name]=e===l?void 0:e}},F=class extends M{constructor(){super(...arguments),this.type=4}j(e){this.element.toggleAttribute(this.name,!!e&&e!==l)}},U=class extends M{constructor(e,t,s,i,r){super(e,t,s,i,r),this.type=5}_$AI(e,t=this){if((e=E(this,e,t,0)??l)===C)return;let s=this._$AH,i=e===l&&s!==l||e.capture!==s.capture||e.once!==s.once||e.passive!==s.passive,r=e!==l&&(s===l||i);i&&this.element.removeEventListener(this.name,this,s),r&&this.element.addEventListener(this.name,this,e),this._$AH=e}handleEvent(e){typeof this._$AH=="function"?this._$AH.call(this.options?.host??this.element,e):this._$AH.handleEvent(e)}},D=class{constructor(e,t,s){this.element=e,this.type=6,this._$AN=void 0,this._$AM=t,this.options=s}get _$AU(){return this._$AM._$AU}_$AI(e){E(this,e)}};var de=B.litHtmlPolyfillSupport;de?.(H,V),(B.litHtmlVersions??=[]).push("3.3.3");var _=(n,e,t)=>{let s=t?.renderBefore??e,i=s._$litPart$;if(i===void 0){let r=t?.renderBefore??null;s._$litPart$=i=new V(e.insertBefore(T(),r),r,void 0,t??{})}return i._$AI(n),i};var m=class extends Error{constructor(t,s,i,r={}){super(i);this.status=t;this.code=s;this.detail=r;this.name="ApiError"}status;code;detail},f=class extends Error{constructor(e){super(`server unreachable: ${String(e)}`),this.name="ConnectionError"}},P=class{constructor(e="",t="",s){this.baseUrl=e;this.token=t;this.fetchFn=s??((i,r)=>fetch(i,r))}baseUrl;token;fetchFn;setToken(e){this.token=e}async request(e,t,s){let i={};s!==void 0&&(i["content-type"]="application/json"),this.token&&(i.authorization=`Bearer ${this.token}`);let r;try{r=await this.fetchFn(this.baseUrl+t,{method:e,headers:i,body:s===void 0?void 0:JSON.stringify(s)})}catch(a){throw new f(a)}if(!r.ok){let a={};try{a=await r.json()}catch{}throw new m(r.status,a.code??"error",a.message??`HTTP ${r.status}`,a.detail??{})}return await r.json()}health(){return this.request("GET","/healthz")}listConflicts(e,t="open"){let s=new URLSearchParams({state:t});return e&&s.set("namespace",e),this.request("GET",`/v1/conflicts?${s}`).then(i=>i.conflicts)}resolveConflict(e,t,s={}){let i={action:t};return s.namespace&&(i.namespace=s.namespace),s.actor&&(i.actor=s.actor),this.request("POST",`/v1/conflicts/${e}/resolve`,i).then(r=>r.conflict)}recall(e){return this.request("POST","/v1/recall",e).then(t=>t.hits)}remember(e){return this.request("POST","/v1/remember",e)}getMemory(e){return this.request("GET",`/v1/memories/${e}`)}asOf(e,t){let s=new URLSearchParams({namespace:e,t:String(t)});return this.request("GET",`/v1/memories/asof?${s}`).then(i=>i.records)}changedSince(e,t,s){let i=new URLSearchParams({namespace:e,changed_since:String(t)});return s!==void 0&&i.set("until",String(s)),this.request("GET",`/v1/memories?${i}`).then(r=>r.records)}sessions(e){let t=new URLSearchParams;e&&t.set("namespace",e);let s=t.size?`?${t}`:"";return this.request("GET",`/v1/sessions${s}`).then(i=>i.sessions)}dailySummary(e,t){let s=new URLSearchParams({namespace:e,date:t});return this.request("GET",`/v1/daily-summary?${s}`)}};function y(n,e){customElements.get(n)||customElements.define(n,e)}function b(n){return new Date(n).toISOString().replace("T"," ").slice(0,19)}function q(n){return n.toFixed(3)}function oe(){return new Date().toISOString().slice(0,10)}var pe=5e3,ue=["supersede","retain","annotate"],W=class extends HTMLElement{api=null;namespace=null;pollMs=pe;conflicts=[];records=new Map;offline=!1;loaded=!1;notice=null;inFlight=new Set;timer=null;connectedCallback(){this.namespace=this.getAttribute("namespace")||this.namespace,this.refresh(),this.timer=setInterval(()=>{this.refresh()},this.pollMs)}disconnectedCallback(){this.timer!==null&&clearInterval(this.timer),this.timer=null}get openCount(){return this.conflicts.length}async refresh(){if(this.api){try{let e=await this.api.listConflicts(this.namespace??void 0,"open"),t=e.map(i=>i.new_record).filter(i=>!this.records.has(i)),s=await Promise.all(t.map(i=>this.api.getMemory(i)));for(let i of s)this.records.set(i.id,i);this.conflicts=e,this.offline=!1,this.loaded=!0}catch(e){if(e instanceof f)this.offline=!0;else if(e instanceof m)this.notice={kind:"error",text:`${e.code}: ${e.message}`};else throw e}this._render()}}async resolve(e,t){if(!(!this.api||this.inFlight.has(e.conflict_id))){this.inFlight.add(e.conflict_id),this.conflicts=this.conflicts.filter(s=>s.conflict_id!==e.conflict_id),this.notice=null,this._render();try{await this.api.resolveConflict(e.conflict_id,t,{namespace:e.namespace,actor:"dashboard"}),this.notice={kind:"ok",text:`resolved ${e.conflict_id}: ${t}`}}catch(s){if(s instanceof m&&s.code==="already_resolved")this.notice={kind:"warn",text:`${e.conflict_id} was already resolved elsewhere`};else if(s instanceof m)this.restore(e),this.notice={kind:"error",text:`${s.code}: ${s.message} \u2014 retry available`};else if(s instanceof f)this.restore(e),this.offline=!0,this.notice={kind:"error",text:"server unreachable \u2014 retry available"};else throw this.inFlight.delete(e.conflict_id),s}this.inFlight.delete(e.conflict_id),this._render()}}restore(e){this.conflicts=[...this.conflicts,e].sort((t,s)=>s.opened_at-t.opened_at||(t.conflict_id<s.conflict_id?-1:1))}card(e){let t=this.records.get(e.new_record);return c`
      <div class="card" data-conflict=${e.conflict_id}>
        <div class="card-head">
          <code>${e.conflict_id}</code>
          <span class="when">opened ${b(e.opened_at)}</span>
        </div>
        ${t?c`
            <div class="incoming">
              <span class="type-badge">${t.type}</span>
              <span class="content">${t.content}</span>
              <span class="when">written ${b(t.created_at)}</span>
            </div>`:c`<div class="incoming"><code>${e.new_record}</code></div>`}
        <ul class="candidates">
          ${e.candidates.map(s=>c`
              <li>
                <span class="score">${q(s.score)}</span>
                <code>${s.record_id}</code>
              </li>`)}
        </ul>
        <div class="actions">
          ${ue.map(s=>c`
              <button
                data-action=${s}
                ?disabled=${this.inFlight.has(e.conflict_id)}
                @click=${()=>{this.resolve(e,s)}}
              >${s}</button>`)}
        </div>
      </div>
    `}template(){return c`
      ${this.offline?c`<div class="banner">connection lost — showing last known queue</div>`:l}
      <div class="queue-head">
        <span class="badge">${this.openCount} open</span>
      </div>
      ${this.notice?c`<div class="notice notice-${this.notice.kind}">${this.notice.text}</div>`:l}
      ${this.loaded&&this.conflicts.length===0?c`<div class="empty">No open conflicts. Nothing needs review.</div>`:this.conflicts.map(e=>this.card(e))}
    `}_render(){_(this.template(),this)}};y("conflict-queue",W);var z=class extends HTMLElement{api=null;namespace="";date=oe();summary=null;error=null;connectedCallback(){this.namespace=this.getAttribute("namespace")||this.namespace,this._render()}async load(){if(this.api){this.error=null;try{this.summary=await this.api.dailySummary(this.namespace,this.date)}catch(e){if(e instanceof m)this.error=`${e.code}: ${e.message}`;else if(e instanceof f)this.error="server unreachable";else throw e}this._render()}}onSubmit(e){e.preventDefault(),this.load()}template(){let e=this.summary;return c`
      <form class="daily-form" @submit=${t=>this.onSubmit(t)}>
        <input
          name="namespace" placeholder="namespace" .value=${this.namespace}
          @input=${t=>{this.namespace=t.target.value}}
        />
        <input
          name="date" placeholder="YYYY-MM-DD" .value=${this.date}
          @input=${t=>{this.date=t.target.value}}
        />
        <button type="submit">load</button>
      </form>
      ${this.error?c`<div class="notice notice-error">${this.error}</div>`:l}
      ${e?c`
          <div class="daily-counts">
            ${Object.entries(e.counts_by_type).map(([t,s])=>c`<span class="count"><span class="type-badge">${t}</span> ${s}</span>`)}
          </div>
          <ul class="daily-sessions">
            ${e.sessions.map(t=>c`<li><code>${t.session_id}</code> ${b(t.start)} → ${b(t.end)}</li>`)}
          </ul>
          <pre class="daily-rendered">${e.rendered}</pre>`:l}
    `}_render(){_(this.template(),this)}};y("daily-summary-view",z);var Y=class extends HTMLElement{api=null;namespace="";query="";asOfEnabled=!1;asOfMs="";includeSuperseded=!1;rows=null;error=null;searched=!1;connectedCallback(){this.namespace=this.getAttribute("namespace")||this.namespace,this._render()}async search(){if(this.api){this.error=null;try{if(this.query.trim()===""&&this.asOfEnabled){let e=await this.api.asOf(this.namespace,Number(this.asOfMs));this.rows=e.map(t=>({score:null,record:t}))}else{let e=await this.api.recall({namespace:this.namespace,query:this.query,include_superseded:this.includeSuperseded,...this.asOfEnabled?{as_of:Number(this.asOfMs)}:{}});this.rows=e.map(t=>({score:t.score,record:t.record}))}this.searched=!0}catch(e){if(e instanceof m)this.error=`${e.code}: ${e.message}`;else if(e instanceof f)this.error="server unreachable";else throw e}this._render()}}row({score:e,record:t}){let s=t.state==="superseded";return c`
      <tr class=${s?"superseded":""} data-record=${t.id}>
        <td class="score">${e===null?"\u2014":q(e)}</td>
        <td><span class="type-badge">${t.type}</span></td>
        <td><span class="state-badge state-${t.state}">${t.state}</span></td>
        <td class="content">${s?c`<s>${t.content}</s>`:t.content}</td>
        <td class="when">${b(t.created_at)}</td>
      </tr>
    `}onSubmit(e){e.preventDefault(),this.search()}template(){return c`
      <form class="browser-form" @submit=${e=>this.onSubmit(e)}>
        <input
          name="namespace" placeholder="namespace" .value=${this.namespace}
          @input=${e=>{this.namespace=e.target.value}}
        />
        <input
          name="query" placeholder="query (empty + as-of lists everything)"
          .value=${this.query}
          @input=${e=>{this.query=e.target.value}}
        />
        <label>
          <input
            type="checkbox" name="as-of-toggle" .checked=${this.asOfEnabled}
            @change=${e=>{this.asOfEnabled=e.target.checked,this._render()}}
          />
          as of
        </label>
        <input
          name="as-of-ms" placeholder="epoch ms" .value=${this.asOfMs}
          ?disabled=${!this.asOfEnabled}
          @input=${e=>{this.asOfMs=e.target.value}}
        />
        <label>
          <input
            type="checkbox" name="include-superseded" .checked=${this.includeSuperseded}
            @change=${e=>{this.includeSuperseded=e.target.checked}}
          />
          include superseded
        </label>
        <button type="submit">search</button>
      </form>
      ${this.error?c`<div class="notice notice-error">${this.error}</div>`:l}
      ${this.rows===null?l:this.rows.length===0?c`<div class="empty">${this.searched?"No matching memories.":""}</div>`:c`
            <table class="hits">
              <thead>
                <tr><th>score</th><th>type</th><th>state</th><th>content</th><th>created</th></tr>
              </thead>
              <tbody>${this.rows.map(e=>this.row(e))}</tbody>
            </table>`}
    `}_render(){_(this.template(),this)}};y("memory-browser",Y);var me=[{id:"queue",label:"Review queue"},{id:"browser",label:"Memories"},{id:"daily",label:"Daily summary"}],J=class extends HTMLElement{api=null;tab="queue";namespace="";connectedCallback(){let e=this.getAttribute("base-url")??window.MEMGRAIN_BASE??"";this.api=this.api??new P(e),this.namespace=this.getAttribute("namespace")||this.namespace,this._render()}switchTab(e){this.tab=e,this._render()}panel(){switch(this.tab){case"queue":return c`<conflict-queue .api=${this.api} .namespace=${this.namespace||null}></conflict-queue>`;case"browser":return c`<memory-browser .api=${this.api} .namespace=${this.namespace}></memory-browser>`;case"daily":return c`<daily-summary-view .api=${this.api} .namespace=${this.namespace}></daily-summary-view>`}}template(){return c`
      <header>
        <h1>memgrain</h1>
        <input
          name="namespace-filter" placeholder="namespace (blank = all)"
          .value=${this.namespace}
          @change=${e=>{this.namespace=e.target.value,this._render()}}
        />
        <input
          name="token" type="password" placeholder="API token"
          @change=${e=>this.api?.setToken(e.target.value)}
        />
      </header>
      <nav>
        ${me.map(({id:e,label:t})=>c`
            <button
              class=${this.tab===e?"tab active":"tab"}
              data-tab=${e}
              @click=${()=>this.switchTab(e)}
            >${t}</button>`)}
      </nav>
      <main>${this.panel()}</main>
    `}_render(){_(this.template(),this)}};y("memgrain-dashboard",J);export{J as MemgrainDashboard};
/*! Bundled license information:

lit-html/lit-html.js:
  (**
   * @license
   * Copyright 2017 Google LLC
   * SPDX-License-Identifier: BSD-3-Clause
   *)
*/
